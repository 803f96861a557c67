"""Pearson correlation with Fisher-transform confidence intervals.

Trajectory sets are compared by pooling pointwise pairs across every shared
(token_id, c_index) key: one global r, matching how a tight interval arises
from token-count x 50 paired points. A per-token mean of individual
correlations is exposed as a diagnostic, not the headline statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .errors import (
    EmptyPairingError,
    InsufficientDataError,
    SchemaError,
    UndefinedCorrelationError,
)
from .trajectory import TrajectoryRecord
from ._validation import as_float_1d


@dataclass
class CorrelationResult:
    r: float
    ci_low: float
    ci_high: float
    n: int
    p: float
    unmatched_keys: int = 0
    per_token_mean_r: Optional[float] = None


def pearson(x, y) -> CorrelationResult:
    """Product-moment correlation with a 95% Fisher CI and t-based p-value.

    CI bounds are tanh(atanh(r) +/- 1.96/sqrt(n-3)); p comes from
    t = r*sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom (two-sided).
    """
    x = as_float_1d(x, "x")
    y = as_float_1d(y, "y")
    if len(x) != len(y):
        raise InsufficientDataError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 4:
        raise InsufficientDataError(f"need at least 4 pairs, got {n}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("zero variance in an input sequence")
    r = float(dx @ dy / np.sqrt(sxx * syy))
    r = min(1.0, max(-1.0, r))

    if abs(r) < 1.0:
        z = np.arctanh(r)
        half_width = 1.96 / np.sqrt(n - 3)
        ci_low = float(np.tanh(z - half_width))
        ci_high = float(np.tanh(z + half_width))
        t = r * np.sqrt((n - 2) / (1.0 - r * r))
        p = 2.0 * float(sps.t.sf(abs(t), n - 2))
    else:
        ci_low = ci_high = r
        p = 0.0
    return CorrelationResult(r=r, ci_low=ci_low, ci_high=ci_high, n=n, p=p)


def _record_key(record: TrajectoryRecord) -> tuple[str, Optional[int]]:
    return (record.token_id, record.c_index)


def trajectory_correlation(
    a: Sequence[TrajectoryRecord], b: Sequence[TrajectoryRecord]
) -> CorrelationResult:
    """Pooled pointwise correlation between two trajectory sets.

    Records pair on identical (token_id, c_index) keys; for each shared key,
    every point where both sides are present contributes one (a, b) pair.
    Pairs with a missing side are skipped, never imputed. Duplicate keys
    within one set raise :class:`SchemaError` (a multi-layer CSV must be
    split per layer before correlating). Symmetric in its arguments.
    """
    index_a = _index_by_key(a, "first")
    index_b = _index_by_key(b, "second")
    shared = sorted(set(index_a) & set(index_b), key=lambda k: (k[0], -1 if k[1] is None else k[1]))
    if not shared:
        raise EmptyPairingError("no shared (token_id, c_index) keys between the two sets")
    unmatched = (len(index_a) - len(shared)) + (len(index_b) - len(shared))

    xs, ys, token_rs = [], [], []
    for key in shared:
        pa = index_a[key].points
        pb = index_b[key].points
        if len(pa) != len(pb):
            raise SchemaError(
                f"token {key[0]}: point counts differ ({len(pa)} vs {len(pb)})"
            )
        both = ~np.isnan(pa) & ~np.isnan(pb)
        if both.any():
            xs.append(pa[both])
            ys.append(pb[both])
        if both.sum() >= 4:
            try:
                token_rs.append(pearson(pa[both], pb[both]).r)
            except UndefinedCorrelationError:
                pass
    if not xs:
        raise EmptyPairingError("shared keys exist but no point has both values present")
    result = pearson(np.concatenate(xs), np.concatenate(ys))
    result.unmatched_keys = unmatched
    if token_rs:
        result.per_token_mean_r = float(np.mean(token_rs))
    return result


def _index_by_key(records: Sequence[TrajectoryRecord], side: str):
    index: dict[tuple[str, Optional[int]], TrajectoryRecord] = {}
    for record in records:
        key = _record_key(record)
        if key in index:
            raise SchemaError(
                f"duplicate key {key} in the {side} trajectory set; "
                "split pooled layer CSVs per layer before correlating"
            )
        index[key] = record
    return index
