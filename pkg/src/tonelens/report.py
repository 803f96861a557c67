"""Artifact emission: SVG mean-trajectory plots and aggregate summaries."""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import asdict
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, SchemaError
from .gam import Design, GamFit
from .stats import CorrelationResult
from .svg import mean_trajectory_svg
from .trajectory import (
    ONSET_FRACTION,
    MeanTrajectory,
    TrajectoryRecord,
    default_group_key,
    mean_trajectory,
    read_trajectory_csv,
)

# Values from the full-scale reference analysis this toolkit's defaults
# mirror. They depend on full-scale stochastic training, so they are
# carried in summaries for side-by-side comparison and never asserted.
REFERENCE_BENCHMARKS = {
    "natural_corpus_gam_adjusted_r2": 0.267,
    "model_gam_adjusted_r2": {
        "whole_set": 0.021,
        "male_set": 0.12,
        "female_set": 0.0184,
    },
    "layer_output_correlation": {
        "conv4": {"r": 0.26, "ci": [0.258, 0.264]},
        "conv3": {"r": 0.078, "ci": [0.076, 0.082]},
        "conv2": {"r": -0.0042, "ci": [-0.0073, -0.0014]},
    },
}

_GAM_REQUIRED_KEYS = {"lambda", "edf", "adjusted_r2", "n_obs", "coefficients", "terms"}
_CORR_REQUIRED_KEYS = {"r", "ci_low", "ci_high", "n", "p"}


def gam_summary(fit: GamFit, design: Design, group: str) -> dict:
    """Machine-readable GAM summary for the gam command's JSON output."""
    return {
        "lambda": fit.lam,
        "edf": fit.edf,
        "adjusted_r2": fit.adjusted_r2,
        "r2_defined": fit.r2_defined,
        "n_obs": fit.n_obs,
        "rss": fit.rss,
        "tss": fit.tss,
        "gcv": fit.gcv,
        "coefficients": [float(c) for c in fit.coefficients],
        "terms": [
            {
                "name": t.name,
                "kind": t.kind,
                "statistic": t.statistic,
                "df": t.df,
                "p": t.p,
                "testable": t.testable,
            }
            for t in fit.term_tests
        ],
        "config": {
            "group": group,
            "reference_category": design.category_labels[0],
            "category_labels": design.category_labels,
            "basis_dim": design.spec.basis_dim,
            "spline_degree": design.spec.spline_degree,
            "penalty_order": design.spec.penalty_order,
            "lambda_min": design.spec.lambda_min,
            "lambda_max": design.spec.lambda_max,
            "lambda_steps": design.spec.lambda_steps,
            "smoothing_selection": "gcv",
        },
        "warnings": design.warnings,
    }


def correlation_summary(result: CorrelationResult) -> dict:
    return {k: v for k, v in asdict(result).items()}


def write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", text).strip("_") or "all"


def _trimmed_points(points: np.ndarray, fraction: float) -> np.ndarray:
    out = points.copy()
    out[: math.ceil(fraction * len(out))] = np.nan
    return out


def plot_groups(
    records: Sequence[TrajectoryRecord], trim_fraction: float = ONSET_FRACTION
) -> dict[str, list[MeanTrajectory]]:
    """Mean trajectories per (source, model) plot, keyed by plot name.

    Natural tokens get the onset trim before averaging; model outputs and
    layer taps keep all points.
    """
    buckets: dict[str, list[TrajectoryRecord]] = {}
    for record in records:
        name = record.source or "unknown"
        if record.model_id:
            name = f"{name}_{record.model_id}"
        buckets.setdefault(_slug(name), []).append(record)
    plots = {}
    for name in sorted(buckets):
        group = buckets[name]
        if group[0].source == "natural" and trim_fraction > 0:
            group = [
                TrajectoryRecord(
                    token_id=r.token_id,
                    source=r.source,
                    model_id=r.model_id,
                    c_index=r.c_index,
                    tone=r.tone,
                    points=_trimmed_points(r.points, trim_fraction),
                )
                for r in group
            ]
        plots[name] = mean_trajectory(group, default_group_key)
    return plots


def _load_artifact(path: str, required: set[str], label: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: unreadable {label} artifact ({exc})") from exc
    if not isinstance(payload, dict) or not required.issubset(payload):
        missing = required - set(payload) if isinstance(payload, dict) else required
        raise SchemaError(f"{path}: {label} artifact missing keys {sorted(missing)}")
    return payload


def run_report(
    traj_csvs: Sequence[str],
    gam_jsons: Sequence[str],
    corr_jsons: Sequence[str],
    out_dir: str,
    trim_fraction: float = ONSET_FRACTION,
) -> dict:
    """Emit one SVG per model/group plus an aggregate summary JSON.

    Returns the summary payload; writes files under ``out_dir``. Requires
    at least one input artifact; malformed upstream artifacts raise
    :class:`SchemaError` naming the file.
    """
    if not (traj_csvs or gam_jsons or corr_jsons):
        raise EmptyInputError("run_report needs at least one input artifact")
    os.makedirs(out_dir, exist_ok=True)

    summary: dict = {
        "plots": [],
        "gam": [],
        "correlations": [],
        "reference_benchmarks": REFERENCE_BENCHMARKS,
    }
    for csv_path in traj_csvs:
        records = read_trajectory_csv(csv_path)
        stem = _slug(os.path.splitext(os.path.basename(csv_path))[0])
        for plot_name, means in plot_groups(records, trim_fraction).items():
            svg_path = os.path.join(out_dir, f"{stem}_{plot_name}.svg")
            with open(svg_path, "w", encoding="utf-8") as fh:
                fh.write(mean_trajectory_svg(means, f"{stem}: {plot_name}"))
            summary["plots"].append(
                {
                    "file": os.path.basename(svg_path),
                    "source_csv": os.path.basename(csv_path),
                    "groups": [
                        {
                            "key": m.group_key,
                            "n_tokens": int(m.counts.max()) if len(m.counts) else 0,
                        }
                        for m in means
                    ],
                }
            )
    for path in gam_jsons:
        payload = _load_artifact(path, _GAM_REQUIRED_KEYS, "gam")
        summary["gam"].append(
            {
                "file": os.path.basename(path),
                "adjusted_r2": payload["adjusted_r2"],
                "edf": payload["edf"],
                "lambda": payload["lambda"],
                "n_obs": payload["n_obs"],
            }
        )
    for path in corr_jsons:
        payload = _load_artifact(path, _CORR_REQUIRED_KEYS, "correlation")
        summary["correlations"].append(
            {
                "file": os.path.basename(path),
                "r": payload["r"],
                "ci": [payload["ci_low"], payload["ci_high"]],
                "n": payload["n"],
                "p": payload["p"],
            }
        )
    write_json(summary, os.path.join(out_dir, "summary.json"))
    return summary
