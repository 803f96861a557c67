"""Audio export: generated outputs and channel-averaged layer taps.

Every z is crossed with each of the four scaled generation codes, so
n_z latents yield n_z x 4 outputs. Layer taps reuse the generated tokens'
ids so trajectory sets pair on (token_id, c_index) downstream; each tapped
layer gets its own manifest, because trajectory CSVs carry no layer column
and per-layer files are the supported correlation route.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from .errors import CheckpointMismatchError, LabError
from .latent import LatentSpec, generation_codes, make_generator_seeded, sample_z
from .models import (
    OUTPUT_SAMPLES,
    SAMPLE_RATE,
    TAP_LAYERS,
    Generator,
    build_models,
)
from .wavio import write_wav

TAP_PEAK = 0.9
GENERATE_BATCH = 32


@dataclass
class LayerTapConfig:
    """Which layers to tap; reduction is channel mean, upsampling is
    nearest-repeat to the output length."""

    layers: tuple[int, ...] = TAP_LAYERS

    def __post_init__(self) -> None:
        layers = tuple(sorted(set(int(l) for l in self.layers)))
        if not layers:
            raise CheckpointMismatchError("tap layers must be non-empty")
        bad = [l for l in layers if l not in TAP_LAYERS]
        if bad:
            raise CheckpointMismatchError(
                f"tap layers must be a subset of {set(TAP_LAYERS)}, got {bad}"
            )
        self.layers = layers


def load_generator(ckpt_path: str) -> tuple[Generator, LatentSpec, dict]:
    """Rebuild the generator from a checkpoint and load its weights."""
    payload = torch.load(ckpt_path, map_location="cpu", weights_only=False)
    spec = LatentSpec(**payload["latent_spec"])
    model_size = payload["config"]["model_size"]
    gen, _, _ = build_models(spec, model_size)
    try:
        gen.load_state_dict(payload["generator"])
    except RuntimeError as exc:
        raise CheckpointMismatchError(f"{ckpt_path}: {exc}") from exc
    gen.eval()
    return gen, spec, payload


def _token_id(z_index: int, c_index: int) -> str:
    return f"z{z_index:05d}_c{c_index}"


def _latents_for(gen_spec: LatentSpec, n_z: int, seed: int, scale: Optional[float]):
    if n_z < 1:
        raise LabError(f"n_z must be >= 1, got {n_z}")
    z = sample_z(n_z, gen_spec, make_generator_seeded(seed))
    spec = gen_spec if scale is None else LatentSpec(
        z_dim=gen_spec.z_dim, c_dim=gen_spec.c_dim, generation_scale=scale
    )
    return z, generation_codes(spec)


def generate(
    ckpt_path: str,
    n_z: int,
    out_dir: str,
    scale: Optional[float] = None,
    seed: int = 0,
    model_id: Optional[str] = None,
) -> str:
    """Write n_z x 4 generated WAVs plus a JSONL manifest; returns its path.

    Latents are drawn once from the seed and held constant across the four
    codes, so the same seed always produces identical draws and a
    byte-identical manifest.
    """
    gen, spec, payload = load_generator(ckpt_path)
    os.makedirs(out_dir, exist_ok=True)
    model_id = model_id or f"ciwgan_size{payload['config']['model_size']}"
    z, codes = _latents_for(spec, n_z, seed, scale)

    lines = []
    with torch.no_grad():
        for start in range(0, n_z, GENERATE_BATCH):
            z_batch = z[start : start + GENERATE_BATCH]
            for c_index in range(spec.c_dim):
                code = codes[c_index].expand(len(z_batch), -1)
                audio = gen(torch.cat([z_batch, code], dim=1)).squeeze(1).numpy()
                for row, wave in enumerate(audio):
                    token = _token_id(start + row, c_index)
                    name = f"{token}.wav"
                    write_wav(wave, os.path.join(out_dir, name), SAMPLE_RATE)
                    lines.append(
                        {
                            "path": name,
                            "token_id": token,
                            "source": "generated",
                            "c_index": c_index,
                            "model_id": model_id,
                        }
                    )
    lines.sort(key=lambda r: r["token_id"])
    manifest = os.path.join(out_dir, "manifest.jsonl")
    with open(manifest, "w", encoding="utf-8") as fh:
        for record in lines:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return manifest


def reduce_tap(feature_map: np.ndarray) -> tuple[np.ndarray, bool]:
    """Channel-mean, nearest-repeat to output length, peak-normalize to 0.9.

    Returns (samples, silent): an all-zero feature map is written as
    silence and flagged.
    """
    mean = feature_map.mean(axis=0)
    factor = OUTPUT_SAMPLES // len(mean)
    upsampled = np.repeat(mean, factor)
    peak = np.max(np.abs(upsampled))
    if peak == 0.0:
        return upsampled, True
    return upsampled * (TAP_PEAK / peak), False


def extract_layer_audio(
    ckpt_path: str,
    n_z: int,
    out_dir: str,
    taps: Optional[LayerTapConfig] = None,
    scale: Optional[float] = None,
    seed: int = 0,
    model_id: Optional[str] = None,
) -> dict[int, str]:
    """Write channel-averaged layer audio for every generated item.

    Returns {layer_index: manifest path}. Token ids match generate() for
    the same seed, so tap and output trajectory sets pair key-for-key.
    """
    if taps is None:
        taps = LayerTapConfig()
    gen, spec, payload = load_generator(ckpt_path)
    os.makedirs(out_dir, exist_ok=True)
    model_id = model_id or f"ciwgan_size{payload['config']['model_size']}"
    z, codes = _latents_for(spec, n_z, seed, scale)

    per_layer: dict[int, list[dict]] = {layer: [] for layer in taps.layers}
    with torch.no_grad():
        for start in range(0, n_z, GENERATE_BATCH):
            z_batch = z[start : start + GENERATE_BATCH]
            for c_index in range(spec.c_dim):
                code = codes[c_index].expand(len(z_batch), -1)
                _, tap_maps = gen(torch.cat([z_batch, code], dim=1), return_taps=True)
                for layer in taps.layers:
                    maps = tap_maps[layer].numpy()
                    for row in range(len(z_batch)):
                        token = _token_id(start + row, c_index)
                        samples, silent = reduce_tap(maps[row])
                        name = f"{token}_conv{layer}.wav"
                        write_wav(samples, os.path.join(out_dir, name), SAMPLE_RATE)
                        record = {
                            "path": name,
                            "token_id": token,
                            "source": "layer_tap",
                            "layer_index": layer,
                            "c_index": c_index,
                            "model_id": model_id,
                        }
                        if silent:
                            record["warning"] = "all_zero_feature_map"
                        per_layer[layer].append(record)

    manifests: dict[int, str] = {}
    for layer in taps.layers:
        records = sorted(per_layer[layer], key=lambda r: r["token_id"])
        path = os.path.join(out_dir, f"manifest_conv{layer}.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        manifests[layer] = path
    return manifests
