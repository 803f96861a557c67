"""Short-time autocorrelation pitch tracking.

Frames are Hann-windowed; the lag score is the energy-normalized
cross-correlation of the frame against itself over the overlapping region,
which is bounded in [-1, 1] at every lag and therefore keeps a single fixed
voicing threshold meaningful across the whole search band. A frame is voiced
when the interpolated peak clears the voicing threshold and the frame has
non-negligible energy relative to the clip.

No octave-cost or path smoothing is applied: the 60-350 Hz search band
already suppresses most octave errors, and a single-candidate argmax keeps
the tracker deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .audio import AudioClip
from .errors import ParameterError, TooShortError
from ._validation import check_band, check_positive

DEFAULT_FLOOR = 60.0
DEFAULT_CEIL = 350.0
DEFAULT_TIME_STEP = 0.01
DEFAULT_WINDOW = 0.04
DEFAULT_VOICING_THRESHOLD = 0.45
# frames quieter than this fraction of clip RMS are never voiced
RMS_GATE_FRACTION = 0.01


@dataclass
class PitchFrame:
    time: float
    f0: Optional[float]
    voiced: bool
    strength: float


@dataclass
class PitchTrack:
    """Per-frame F0 readings for one token.

    Frame times are measured on the samples handed to the tracker; if the
    amplitude gate ran upstream, they index gated time, not original time.
    """

    frames: list[PitchFrame]
    floor: float
    ceil: float
    token_id: str = ""

    def voiced_frames(self) -> list[PitchFrame]:
        return [f for f in self.frames if f.voiced]

    def __len__(self) -> int:
        return len(self.frames)


def _normalized_autocorr(segment: np.ndarray, max_lag: int) -> np.ndarray:
    """Energy-normalized autocorrelation for lags 0..max_lag inclusive."""
    w = len(segment)
    acf = np.correlate(segment, segment, mode="full")[w - 1 : w + max_lag]
    energy = np.concatenate(([0.0], np.cumsum(segment * segment)))
    lags = np.arange(max_lag + 1)
    head = energy[w - lags]            # sum of x[0 .. w-lag-1]^2
    tail = energy[w] - energy[lags]    # sum of x[lag .. w-1]^2
    denom = np.sqrt(head * tail)
    out = np.zeros(max_lag + 1)
    good = denom > 0
    out[good] = acf[good] / denom[good]
    return out


def _window_envelope(window: np.ndarray, max_lag: int) -> np.ndarray:
    """Lag envelope the window itself imprints on the normalized score.

    For a stationary narrowband signal the windowed score's peak is tilted
    by this envelope; dividing it out around the peak before parabolic
    refinement removes the tilt without disturbing peak selection.
    """
    w = len(window)
    ww = np.correlate(window, window, mode="full")[w - 1 : w + max_lag]
    energy = np.concatenate(([0.0], np.cumsum(window * window)))
    lags = np.arange(max_lag + 1)
    denom = np.sqrt(energy[w - lags] * (energy[w] - energy[lags]))
    env = np.ones(max_lag + 1)
    good = denom > 0
    env[good] = ww[good] / denom[good]
    return env / env[0]


def track_pitch(
    clip: AudioClip,
    floor: float = DEFAULT_FLOOR,
    ceil: float = DEFAULT_CEIL,
    time_step: float = DEFAULT_TIME_STEP,
    window: float = DEFAULT_WINDOW,
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
) -> PitchTrack:
    """Track F0 with frame centers at multiples of ``time_step``.

    Voiced frames report f0 = 1/lag with the lag refined by parabolic
    interpolation and clamped to the search band, so every reported f0 lies
    in [floor, ceil]. Raises :class:`TooShortError` when the clip is shorter
    than one analysis window.
    """
    check_positive(time_step, "time_step")
    check_positive(window, "window")
    sr = clip.sample_rate
    check_band(floor, ceil, sr)

    samples = clip.samples
    win_len = int(round(window * sr))
    if len(samples) < win_len or win_len < 4:
        raise TooShortError(
            f"clip of {len(samples)} samples is shorter than the {win_len}-sample window"
        )

    lag_lo = int(np.ceil(sr / ceil))
    lag_hi = int(np.floor(sr / floor))
    lag_hi = min(lag_hi, win_len - 2)
    if lag_lo < 2:
        lag_lo = 2
    if lag_lo > lag_hi:
        raise ParameterError(
            f"window of {win_len} samples cannot hold lags for the "
            f"[{floor}, {ceil}] Hz band at {sr} Hz"
        )
    hann = np.hanning(win_len)
    max_lag = min(lag_hi + 1, win_len - 1)
    envelope = _window_envelope(hann, max_lag)

    clip_rms = float(np.sqrt(np.mean(samples * samples)))
    half = win_len // 2
    n = len(samples)

    frames: list[PitchFrame] = []
    k = 0
    while True:
        center = k * time_step
        center_idx = int(round(center * sr))
        start = center_idx - half
        if start < 0:
            k += 1
            continue
        if start + win_len > n:
            break
        raw = samples[start : start + win_len]
        frame_rms = float(np.sqrt(np.mean(raw * raw)))
        segment = (raw - raw.mean()) * hann

        r = _normalized_autocorr(segment, max_lag)
        band = r[lag_lo : lag_hi + 1]
        best = int(np.argmax(band)) + lag_lo
        peak = float(r[best])
        lag = float(best)
        if lag_lo < best < lag_hi:  # parabolic refinement needs both neighbors
            r_m, r_0, r_p = r[best - 1 : best + 2] / envelope[best - 1 : best + 2]
            denom = r_m - 2.0 * r_0 + r_p
            if denom < 0:
                delta = 0.5 * (r_m - r_p) / denom
                lag = best + float(np.clip(delta, -0.5, 0.5))
        lag = float(np.clip(lag, sr / ceil, sr / floor))

        voiced = peak >= voicing_threshold and frame_rms >= RMS_GATE_FRACTION * clip_rms
        frames.append(
            PitchFrame(
                time=center,
                f0=(sr / lag) if voiced else None,
                voiced=voiced,
                strength=float(np.clip(peak, 0.0, 1.0)),
            )
        )
        k += 1

    return PitchTrack(frames=frames, floor=floor, ceil=ceil, token_id=clip.token_id)


class PitchTracker(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`track_pitch` over a sequence of clips."""

    def __init__(
        self,
        floor: float = DEFAULT_FLOOR,
        ceil: float = DEFAULT_CEIL,
        time_step: float = DEFAULT_TIME_STEP,
        window: float = DEFAULT_WINDOW,
        voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
    ):
        self.floor = floor
        self.ceil = ceil
        self.time_step = time_step
        self.window = window
        self.voicing_threshold = voicing_threshold

    def fit(self, X=None, y=None):
        return self

    def transform(self, X: list[AudioClip]) -> list[PitchTrack]:
        return [
            track_pitch(
                clip,
                floor=self.floor,
                ceil=self.ceil,
                time_step=self.time_step,
                window=self.window,
                voicing_threshold=self.voicing_threshold,
            )
            for clip in X
        ]
