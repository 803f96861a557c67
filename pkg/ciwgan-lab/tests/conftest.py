"""Shared fixtures: synthetic 4-tone corpus and a briefly trained checkpoint."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

from ciwgan_lab import TrainConfig, train, write_wav

SR = 16000


def tone_f0(tone_index: int, t: np.ndarray) -> np.ndarray:
    curves = [
        np.full_like(t, 220.0),
        150.0 + 100.0 * t,
        210.0 - 90.0 * t + 90.0 * t * t,
        280.0 - 120.0 * t,
    ]
    return curves[tone_index]


def synth_tone(tone_index: int, duration: float = 0.7, sr: int = SR) -> np.ndarray:
    n = int(duration * sr)
    t = np.arange(n) / n
    phase = 2.0 * np.pi * np.cumsum(tone_f0(tone_index, t)) / sr
    sig = 0.7 * np.sin(phase) + 0.25 * np.sin(2 * phase) + 0.08 * np.sin(3 * phase)
    fade = int(0.02 * sr)
    env = np.minimum(1.0, np.minimum(np.arange(n) / fade, (n - np.arange(n)) / fade))
    return 0.8 * sig * env / np.max(np.abs(sig))


def build_tone_corpus(root: str, n_files: int = 64) -> str:
    """Write a synthetic 4-tone corpus; returns the manifest path."""
    os.makedirs(root, exist_ok=True)
    lines = []
    for i in range(n_files):
        tone_index = i % 4
        name = f"tok{i:03d}.wav"
        write_wav(synth_tone(tone_index), os.path.join(root, name), SR)
        lines.append(
            json.dumps(
                {
                    "path": name,
                    "token_id": f"tok{i:03d}",
                    "source": "natural",
                    "tone": f"T{tone_index + 1}",
                },
                sort_keys=True,
            )
        )
    manifest = os.path.join(root, "manifest.jsonl")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


@pytest.fixture(scope="session")
def tone_corpus(tmp_path_factory):
    return build_tone_corpus(str(tmp_path_factory.mktemp("corpus")), n_files=16)


@pytest.fixture(scope="session")
def warm_checkpoint(tmp_path_factory, tone_corpus):
    """A briefly trained tiny checkpoint for generation/tap tests."""
    ckpt_dir = str(tmp_path_factory.mktemp("ckpt"))
    config = TrainConfig(
        steps=10, batch_size=4, model_size=2, seed=0,
        checkpoint_interval=10, log_interval=5,
    )
    result = train(tone_corpus, ckpt_dir, config=config)
    return result.checkpoint_path
