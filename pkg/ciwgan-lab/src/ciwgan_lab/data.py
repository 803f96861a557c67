"""Training data loading: JSONL manifest plus WAVs padded/cropped to 16384."""

from __future__ import annotations

import json
import os

import numpy as np
import torch

from .errors import DataError
from .models import OUTPUT_SAMPLES
from .wavio import read_wav


def _fit_length(samples: np.ndarray, n: int = OUTPUT_SAMPLES) -> np.ndarray:
    if len(samples) >= n:
        start = (len(samples) - n) // 2
        return samples[start : start + n]
    out = np.zeros(n, dtype=samples.dtype)
    out[: len(samples)] = samples
    return out


def load_dataset(manifest_path: str) -> tuple[torch.Tensor, list[str]]:
    """Load all manifest audio as a (n, 1, 16384) tensor plus category labels.

    The label is the tone for natural tokens or the c_index for generated
    ones; training itself is unsupervised, but at least two distinct
    categories must be present for category learning to be meaningful.
    """
    base = os.path.dirname(os.path.abspath(manifest_path))
    clips: list[np.ndarray] = []
    labels: list[str] = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{manifest_path}:{lineno}: unreadable line ({exc})") from exc
            path = record.get("path")
            if not path:
                raise DataError(f"{manifest_path}:{lineno}: missing path")
            if not os.path.isabs(path):
                path = os.path.join(base, path)
            samples, _ = read_wav(path)
            clips.append(_fit_length(samples))
            label = record.get("tone")
            if label is None and record.get("c_index") is not None:
                label = f"c{record['c_index']}"
            labels.append(label if label is not None else "unlabeled")
    if not clips:
        raise DataError(f"{manifest_path}: no audio entries")
    if len(set(labels)) < 2:
        raise DataError(
            f"need at least 2 categories of audio, found {sorted(set(labels))}"
        )
    stack = torch.from_numpy(np.stack(clips)).unsqueeze(1).float()
    return stack, labels
