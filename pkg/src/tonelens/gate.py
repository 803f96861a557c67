"""Amplitude gating: drop samples below a decibel threshold.

Gated samples are deleted and the remainder concatenated (not zero-filled),
so downstream frame times index gated time, not original clip time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .audio import AudioClip
from .errors import EmptyAudioError, ParameterError


@dataclass
class GateConfig:
    """Gate threshold in dB relative to the clip peak (or to full scale).

    Generated clips have arbitrary gain, so the default reference is the
    clip's own peak; ``reference="full_scale"`` switches to an absolute
    threshold against 1.0.
    """

    threshold_db: float = -30.0
    reference: Literal["peak", "full_scale"] = "peak"

    def __post_init__(self) -> None:
        if not self.threshold_db < 0:
            raise ParameterError(f"threshold_db must be negative, got {self.threshold_db!r}")
        if self.reference not in ("peak", "full_scale"):
            raise ParameterError(f"unknown gate reference {self.reference!r}")


def amplitude_gate(clip: AudioClip, cfg: GateConfig | None = None) -> AudioClip:
    """Keep exactly the samples with |s| >= ref * 10^(threshold_db/20).

    A clip whose peak is zero yields an empty clip. Raises
    :class:`EmptyAudioError` for empty input.
    """
    if cfg is None:
        cfg = GateConfig()
    if len(clip) == 0:
        raise EmptyAudioError("cannot gate an empty clip")
    magnitudes = np.abs(clip.samples)
    ref = magnitudes.max() if cfg.reference == "peak" else 1.0
    if ref == 0.0:
        kept = clip.samples[:0]
    else:
        threshold = ref * 10.0 ** (cfg.threshold_db / 20.0)
        kept = clip.samples[magnitudes >= threshold]
    return AudioClip(samples=kept, sample_rate=clip.sample_rate, token_id=clip.token_id)


class AmplitudeGate(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`amplitude_gate` over a sequence of clips."""

    def __init__(self, threshold_db: float = -30.0, reference: str = "peak"):
        self.threshold_db = threshold_db
        self.reference = reference

    def fit(self, X=None, y=None):
        return self

    def transform(self, X: list[AudioClip]) -> list[AudioClip]:
        cfg = GateConfig(threshold_db=self.threshold_db, reference=self.reference)
        return [amplitude_gate(clip, cfg) for clip in X]
