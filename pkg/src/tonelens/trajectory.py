"""Fixed-length time-normalized F0 trajectories and their aggregation.

A trajectory is exactly ``n_points`` (50 by default) equally spaced samples
of a token's F0 contour over its voiced span, with NaN marking missing
points. The trajectory CSV written here is the contract between the
analyze, gam, and correlate commands.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyInputError, ParameterError, SchemaError
from .metadata import TokenMeta
from .pitch import PitchTrack
from ._validation import check_fraction

N_POINTS = 50
F0_MIN = 60.0
F0_MAX = 350.0
ONSET_FRACTION = 0.2

CSV_HEADER = ("token_id", "source", "model_id", "c_index", "tone", "point_index", "f0_hz")


@dataclass
class NormalizedTrajectory:
    """Equally spaced F0 points for one token; NaN marks missing points."""

    points: np.ndarray
    meta: Optional[TokenMeta] = None

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 1 or len(self.points) == 0:
            raise ParameterError("points must be a non-empty 1-D array")

    @property
    def token_id(self) -> str:
        return self.meta.token_id if self.meta is not None else ""

    def present_mask(self) -> np.ndarray:
        return ~np.isnan(self.points)


@dataclass
class MeanTrajectory:
    """Pointwise mean F0 over a group of trajectories.

    ``counts[i]`` is the number of tokens contributing at point i;
    ``points[i]`` is NaN exactly where ``counts[i]`` is zero.
    """

    group_key: str
    points: np.ndarray
    counts: np.ndarray


@dataclass
class TrajectoryRecord:
    """One token's row group as read back from a trajectory CSV."""

    token_id: str
    source: str
    model_id: Optional[str]
    c_index: Optional[int]
    tone: Optional[str]
    points: np.ndarray


TrajectoryLike = Union[NormalizedTrajectory, TrajectoryRecord]


def normalize_trajectory(
    track: PitchTrack,
    meta: Optional[TokenMeta] = None,
    n_points: int = N_POINTS,
    f0_min: float = F0_MIN,
    f0_max: float = F0_MAX,
) -> Optional[NormalizedTrajectory]:
    """Interpolate a pitch track to ``n_points`` equally spaced points.

    Voiced frames define the (time, f0) knots; knot times are mapped
    affinely onto [0, 1] (anchored at the first and last voiced frame, so
    no extrapolation occurs) and evaluated by linear interpolation at
    k/(n_points-1). Interpolated values outside [f0_min, f0_max] become
    missing. Returns None — the discard signal — when fewer than two voiced
    frames exist.
    """
    if n_points < 2:
        raise ParameterError(f"n_points must be >= 2, got {n_points}")
    voiced = track.voiced_frames()
    if len(voiced) < 2:
        return None
    times = np.array([f.time for f in voiced])
    values = np.array([f.f0 for f in voiced], dtype=np.float64)
    span = times[-1] - times[0]
    u = (times - times[0]) / span
    grid = np.arange(n_points) / (n_points - 1)
    points = np.interp(grid, u, values)
    points[(points < f0_min) | (points > f0_max)] = np.nan
    return NormalizedTrajectory(points=points, meta=meta)


def trim_onset(
    traj: NormalizedTrajectory, fraction: float = ONSET_FRACTION
) -> NormalizedTrajectory:
    """Blank the first ceil(fraction * n) points; length is unchanged.

    The onset consonant does not bear tone, so natural-corpus summaries
    exclude it.
    """
    check_fraction(fraction, "fraction")
    points = traj.points.copy()
    points[: math.ceil(fraction * len(points))] = np.nan
    return NormalizedTrajectory(points=points, meta=traj.meta)


def mean_trajectory(
    trajs: Sequence[TrajectoryLike],
    group_by: Callable[[TrajectoryLike], str],
) -> list[MeanTrajectory]:
    """Pointwise mean per group, skipping missing values.

    Groups are returned in sorted key order; a point with no contributing
    token is missing in the mean.
    """
    if len(trajs) == 0:
        raise EmptyInputError("mean_trajectory needs at least one trajectory")
    groups: dict[str, list[TrajectoryLike]] = {}
    for traj in trajs:
        groups.setdefault(group_by(traj), []).append(traj)
    out = []
    for key in sorted(groups):
        stack = np.vstack([t.points for t in groups[key]])
        present = ~np.isnan(stack)
        counts = present.sum(axis=0)
        sums = np.where(present, stack, 0.0).sum(axis=0)
        points = np.full(stack.shape[1], np.nan)
        nonzero = counts > 0
        points[nonzero] = sums[nonzero] / counts[nonzero]
        out.append(MeanTrajectory(group_key=key, points=points, counts=counts))
    return out


def default_group_key(item: TrajectoryLike) -> str:
    """Tone label for natural tokens, c<index> for model tokens."""
    if isinstance(item, NormalizedTrajectory):
        meta = item.meta
        tone = meta.tone if meta else None
        c_index = meta.c_index if meta else None
    else:
        tone, c_index = item.tone, item.c_index
    if tone is not None:
        return tone
    if c_index is not None:
        return f"c{c_index}"
    return "all"


def write_trajectory_csv(trajs: Iterable[NormalizedTrajectory], path: str) -> None:
    """Write trajectories to the shared CSV contract, one row per point.

    Floats are serialized with repr so the file is byte-deterministic and
    lossless for downstream consumers; missing points are empty strings.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for traj in trajs:
            meta = traj.meta
            source = meta.source if meta else ""
            model_id = meta.model_id or "" if meta else ""
            c_index = "" if meta is None or meta.c_index is None else str(meta.c_index)
            tone = meta.tone or "" if meta else ""
            for idx, value in enumerate(traj.points):
                f0 = "" if np.isnan(value) else repr(float(value))
                writer.writerow([traj.token_id, source, model_id, c_index, tone, idx, f0])


def read_trajectory_csv(path: str) -> list[TrajectoryRecord]:
    """Read a trajectory CSV back into per-token records, in file order.

    Raises :class:`SchemaError` naming the file when the header or a row
    does not match the contract, or when a token's point indexes do not
    form a complete 0..n-1 sequence.
    """
    by_token: dict[str, dict] = {}
    order: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty trajectory CSV") from None
        if tuple(header) != CSV_HEADER:
            raise SchemaError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise SchemaError(f"{path}:{lineno}: expected {len(CSV_HEADER)} columns")
            token_id, source, model_id, c_index, tone, point_index, f0 = row
            try:
                idx = int(point_index)
                value = math.nan if f0 == "" else float(f0)
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            if token_id not in by_token:
                by_token[token_id] = {
                    "source": source,
                    "model_id": model_id or None,
                    "c_index": int(c_index) if c_index != "" else None,
                    "tone": tone or None,
                    "values": {},
                }
                order.append(token_id)
            values = by_token[token_id]["values"]
            if idx in values:
                raise SchemaError(f"{path}:{lineno}: duplicate point {idx} for {token_id}")
            values[idx] = value

    records = []
    for token_id in order:
        entry = by_token[token_id]
        values = entry["values"]
        n = len(values)
        if sorted(values) != list(range(n)):
            raise SchemaError(f"{path}: token {token_id} has gaps in point_index")
        points = np.array([values[i] for i in range(n)])
        records.append(
            TrajectoryRecord(
                token_id=token_id,
                source=entry["source"],
                model_id=entry["model_id"],
                c_index=entry["c_index"],
                tone=entry["tone"],
                points=points,
            )
        )
    return records


class TrajectoryNormalizer(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`normalize_trajectory` over pitch tracks.

    Discarded tracks (fewer than two voiced frames) appear as None in the
    output list so positions stay aligned with the input.
    """

    def __init__(
        self,
        n_points: int = N_POINTS,
        f0_min: float = F0_MIN,
        f0_max: float = F0_MAX,
    ):
        self.n_points = n_points
        self.f0_min = f0_min
        self.f0_max = f0_max

    def fit(self, X=None, y=None):
        return self

    def transform(self, X: list[PitchTrack]) -> list[Optional[NormalizedTrajectory]]:
        return [
            normalize_trajectory(
                track, n_points=self.n_points, f0_min=self.f0_min, f0_max=self.f0_max
            )
            for track in X
        ]
