"""Adversarial training: Wasserstein loss with gradient penalty plus a
categorical cross-entropy between sampled one-hot codes and the Q-network's
estimate on generated audio.

One step is one discriminator batch update; the generator and Q-network
update together on every ``critic_steps``-th step. A fixed seed controls
the data order and every latent draw.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import torch
import torch.nn.functional as F

from .data import load_dataset
from .errors import TrainingDivergedError
from .latent import LatentSpec, make_generator_seeded, sample_one_hot, sample_z
from .models import SAMPLE_RATE, build_models, generator_channels


@dataclass
class TrainConfig:
    steps: int = 2000
    batch_size: int = 64
    model_size: int = 64
    seed: int = 0
    learning_rate: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.9
    gp_weight: float = 10.0
    critic_steps: int = 5
    phase_shuffle: int = 2
    checkpoint_interval: int = 500
    log_interval: int = 100


@dataclass
class TrainResult:
    checkpoint_path: str
    steps_completed: int
    q_loss_start: float
    q_loss_end: float
    history: list[dict] = field(default_factory=list)


def _check_finite(loss: torch.Tensor, name: str, step: int, ckpt_path: str) -> None:
    if not torch.isfinite(loss):
        retained = ckpt_path if os.path.exists(ckpt_path) else "none"
        raise TrainingDivergedError(
            f"non-finite {name} loss at step {step}; last good checkpoint: {retained}"
        )


def _gradient_penalty(disc, real: torch.Tensor, fake: torch.Tensor) -> torch.Tensor:
    eps = torch.rand(real.shape[0], 1, 1, device=real.device)
    inter = (eps * real + (1.0 - eps) * fake).requires_grad_(True)
    scores = disc(inter)
    grads = torch.autograd.grad(scores.sum(), inter, create_graph=True)[0]
    return ((grads.flatten(1).norm(2, dim=1) - 1.0) ** 2).mean()


def _save_checkpoint(path, step, spec, config, gen, disc, qnet, opts, history):
    payload = {
        "step": step,
        "latent_spec": asdict(spec),
        "config": asdict(config),
        "sample_rate": SAMPLE_RATE,
        "generator_channels": generator_channels(config.model_size),
        "generator": gen.state_dict(),
        "discriminator": disc.state_dict(),
        "q_network": qnet.state_dict(),
        "opt_generator": opts[0].state_dict(),
        "opt_discriminator": opts[1].state_dict(),
        "opt_q": opts[2].state_dict(),
        "history": history,
    }
    torch.save(payload, path)


def _eval_q_loss(gen, qnet, z, codes) -> float:
    gen.eval()
    qnet.eval()
    with torch.no_grad():
        audio = gen(torch.cat([z, codes], dim=1))
        logits = qnet(audio)
        loss = F.cross_entropy(logits, codes.argmax(dim=1))
    gen.train()
    qnet.train()
    return float(loss)


def train(
    manifest_path: str,
    ckpt_dir: str,
    config: Optional[TrainConfig] = None,
    spec: Optional[LatentSpec] = None,
) -> TrainResult:
    """Train on the manifest's audio; returns the final checkpoint path.

    Checkpoints (with optimizer state) are written every
    ``checkpoint_interval`` steps and at the end. A non-finite loss aborts
    with :class:`TrainingDivergedError`, leaving the last good checkpoint
    in place.
    """
    if config is None:
        config = TrainConfig()
    if spec is None:
        spec = LatentSpec()
    os.makedirs(ckpt_dir, exist_ok=True)

    data, _labels = load_dataset(manifest_path)
    n_items = data.shape[0]

    torch.manual_seed(config.seed)
    latent_gen = make_generator_seeded(config.seed + 1)
    order_gen = make_generator_seeded(config.seed + 2)

    gen, disc, qnet = build_models(spec, config.model_size, config.phase_shuffle)
    adam = lambda params: torch.optim.Adam(
        params, lr=config.learning_rate, betas=(config.beta1, config.beta2)
    )
    opt_g, opt_d, opt_q = adam(gen.parameters()), adam(disc.parameters()), adam(qnet.parameters())

    eval_z = sample_z(64, spec, make_generator_seeded(config.seed + 3))
    eval_c = sample_one_hot(64, spec, make_generator_seeded(config.seed + 4))
    q_loss_start = _eval_q_loss(gen, qnet, eval_z, eval_c)

    history: list[dict] = []
    ckpt_path = os.path.join(ckpt_dir, "checkpoint.pt")
    order = torch.randperm(n_items, generator=order_gen)
    cursor = 0
    last_g_loss: Optional[float] = None  # None until the first generator update
    last_q_loss: Optional[float] = None

    for step in range(1, config.steps + 1):
        if cursor + config.batch_size > n_items:
            order = torch.randperm(n_items, generator=order_gen)
            cursor = 0
        idx = order[cursor : cursor + config.batch_size]
        cursor += config.batch_size
        real = data[idx]

        z = sample_z(len(real), spec, latent_gen)
        codes = sample_one_hot(len(real), spec, latent_gen)
        with torch.no_grad():
            fake = gen(torch.cat([z, codes], dim=1))
        opt_d.zero_grad()
        d_loss = (
            disc(fake).mean()
            - disc(real).mean()
            + config.gp_weight * _gradient_penalty(disc, real, fake)
        )
        _check_finite(d_loss, "discriminator", step, ckpt_path)
        d_loss.backward()
        opt_d.step()

        if step % config.critic_steps == 0:
            z = sample_z(config.batch_size, spec, latent_gen)
            codes = sample_one_hot(config.batch_size, spec, latent_gen)
            opt_g.zero_grad()
            opt_q.zero_grad()
            audio = gen(torch.cat([z, codes], dim=1))
            g_loss = -disc(audio).mean()
            q_loss = F.cross_entropy(qnet(audio), codes.argmax(dim=1))
            _check_finite(g_loss, "generator", step, ckpt_path)
            _check_finite(q_loss, "q", step, ckpt_path)
            (g_loss + q_loss).backward()
            opt_g.step()
            opt_q.step()
            last_g_loss = float(g_loss.detach())
            last_q_loss = float(q_loss.detach())

        if step % config.log_interval == 0 or step == config.steps:
            history.append(
                {
                    "step": step,
                    "d_loss": float(d_loss.detach()),
                    "g_loss": last_g_loss,
                    "q_loss": last_q_loss,
                }
            )
        if step % config.checkpoint_interval == 0 or step == config.steps:
            _save_checkpoint(
                ckpt_path, step, spec, config, gen, disc, qnet,
                (opt_g, opt_d, opt_q), history,
            )

    q_loss_end = _eval_q_loss(gen, qnet, eval_z, eval_c)
    result = TrainResult(
        checkpoint_path=ckpt_path,
        steps_completed=config.steps,
        q_loss_start=q_loss_start,
        q_loss_end=q_loss_end,
        history=history,
    )
    with open(os.path.join(ckpt_dir, "train_log.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "q_loss_start": q_loss_start,
                "q_loss_end": q_loss_end,
                "history": history,
                "config": asdict(config),
            },
            fh,
            sort_keys=True,
            indent=2,
        )
    return result
