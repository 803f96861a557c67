"""Short training smokes: finiteness, checkpoints, determinism."""

from __future__ import annotations

import os

import pytest
import torch

from ciwgan_lab import TrainConfig, TrainingDivergedError, train
from ciwgan_lab.train import _check_finite


def test_short_run_finite_and_checkpointed(tmp_path, tone_corpus):
    config = TrainConfig(
        steps=12, batch_size=4, model_size=2, seed=1,
        checkpoint_interval=6, log_interval=4,
    )
    result = train(tone_corpus, str(tmp_path / "ckpt"), config=config)
    assert result.steps_completed == 12
    assert all(
        abs(h["d_loss"]) < float("inf") and (h["q_loss"] is None or abs(h["q_loss"]) < float("inf"))
        for h in result.history
    )
    payload = torch.load(result.checkpoint_path, map_location="cpu", weights_only=False)
    assert payload["step"] == 12
    assert payload["generator_channels"] == [32, 16, 8, 4, 2]
    assert payload["latent_spec"]["z_dim"] == 96
    assert "opt_generator" in payload and "exp_avg" in str(payload["opt_generator"])
    assert os.path.exists(str(tmp_path / "ckpt" / "train_log.json"))


def test_same_seed_reproduces_history(tmp_path, tone_corpus):
    config = TrainConfig(
        steps=10, batch_size=4, model_size=2, seed=5,
        checkpoint_interval=10, log_interval=5,
    )
    a = train(tone_corpus, str(tmp_path / "a"), config=config)
    b = train(tone_corpus, str(tmp_path / "b"), config=config)
    assert a.q_loss_start == b.q_loss_start
    assert a.history == b.history


def test_non_finite_loss_aborts():
    with pytest.raises(TrainingDivergedError, match="step 3"):
        _check_finite(torch.tensor(float("nan")), "discriminator", 3, "nowhere.pt")
    with pytest.raises(TrainingDivergedError):
        _check_finite(torch.tensor(float("inf")), "generator", 1, "nowhere.pt")
    _check_finite(torch.tensor(0.5), "q", 1, "nowhere.pt")
