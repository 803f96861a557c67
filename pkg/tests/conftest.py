"""Shared fixtures: synthetic tonal tokens and corpus builders."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

from tonelens import AudioClip, save_wav

SR = 16000

TONE_CURVES = {
    "T1": lambda t: np.full_like(t, 220.0),
    "T2": lambda t: 150.0 + 100.0 * t,
    "T3": lambda t: 210.0 - 90.0 * t + 90.0 * t * t,
    "T4": lambda t: 280.0 - 120.0 * t,
}


def synth_voiced_clip(f0_of_t, duration=0.45, sr=SR, token_id="", harmonics=(0.7, 0.25, 0.08)):
    """Synthesize a voiced token following an F0 curve over normalized time."""
    n = int(round(duration * sr))
    t = np.arange(n) / n
    f0 = f0_of_t(t)
    phase = 2.0 * np.pi * np.cumsum(f0) / sr
    sig = np.zeros(n)
    for k, amp in enumerate(harmonics, start=1):
        sig += amp * np.sin(k * phase)
    fade = int(0.02 * sr)
    env = np.minimum(1.0, np.minimum(np.arange(n) / fade, (n - np.arange(n)) / fade))
    sig = 0.8 * sig * env / np.max(np.abs(sig))
    return AudioClip(samples=sig, sample_rate=sr, token_id=token_id)


def build_natural_corpus(root, syllables=("ma", "ba", "xi", "lu"), duration=0.45):
    """Write a synthetic 4-tone natural corpus plus manifest; returns manifest path."""
    os.makedirs(root, exist_ok=True)
    lines = []
    for si, syllable in enumerate(syllables):
        for ti, tone in enumerate(("T1", "T2", "T3", "T4")):
            name = f"{syllable}{ti + 1}_FV{si % 3 + 1}.wav"
            clip = synth_voiced_clip(
                TONE_CURVES[tone], duration=duration, token_id=name[:-4]
            )
            save_wav(clip, os.path.join(root, name))
            lines.append(
                json.dumps(
                    {
                        "path": name,
                        "token_id": name[:-4],
                        "source": "natural",
                        "tone": tone,
                        "sex": "female",
                        "speaker": f"FV{si % 3 + 1}",
                        "syllable": syllable,
                    },
                    sort_keys=True,
                )
            )
    manifest = os.path.join(root, "manifest.jsonl")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


@pytest.fixture(scope="session")
def natural_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    return build_natural_corpus(str(root))


# Reference category is "falling" so every parametric contrast is non-null:
# rising and flat share the same mean (200 Hz over [0, 1]), so one of them
# must be the other's contrast partner, never the reference.
GAM_CURVES = {
    "falling": lambda t: 280.0 - 120.0 * t,
    "rising": lambda t: 150.0 + 100.0 * t,
    "dipping": lambda t: 200.0 - 80.0 * t + 80.0 * t * t,
    "flat": lambda t: np.full_like(t, 200.0),
}
GAM_LABELS = list(GAM_CURVES)


def build_gam_corpus(n_per_category=100, sigma=5.0, seed=42, n_points=50):
    """Synthetic trajectory rows: four known category curves plus noise."""
    rng = np.random.default_rng(seed)
    grid = np.arange(n_points) / (n_points - 1)
    ts, codes, ys = [], [], []
    for code, label in enumerate(GAM_LABELS):
        truth = GAM_CURVES[label](grid)
        for _ in range(n_per_category):
            ts.append(grid)
            codes.append(np.full(n_points, code))
            ys.append(truth + rng.normal(0.0, sigma, n_points))
    return (
        np.concatenate(ts),
        np.concatenate(codes).astype(np.int64),
        np.concatenate(ys),
        GAM_LABELS,
    )
