"""Batch analysis: manifest in, trajectory CSV plus run record out.

Per-token failures are recorded with a machine-readable reason code and
skipped; the run fails only when zero tokens succeed. Reruns with identical
inputs and flags produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .audio import PIPELINE_RATE, load_wav, resample
from .errors import (
    AudioFormatError,
    EmptyAudioError,
    ManifestError,
    ToneLensError,
    TooShortError,
    UnsupportedCodecError,
    ZeroSuccessError,
)
from .gate import GateConfig, amplitude_gate
from .metadata import TokenMeta, scan_manifest
from .pitch import (
    DEFAULT_CEIL,
    DEFAULT_FLOOR,
    DEFAULT_TIME_STEP,
    DEFAULT_VOICING_THRESHOLD,
    DEFAULT_WINDOW,
    track_pitch,
)
from .trajectory import N_POINTS, NormalizedTrajectory, normalize_trajectory, write_trajectory_csv

THREADS_ENV = "TONELENS_THREADS"

REASON_INSUFFICIENT_VOICED = "insufficient_voiced_points"
REASON_EMPTY_AFTER_GATE = "empty_after_gate"
REASON_LOAD_ERROR = "load_error"
REASON_TOO_SHORT = "too_short"


@dataclass
class AnalyzeConfig:
    """Flag snapshot for one analyze run."""

    gate_db: float = -30.0
    gate_reference: str = "peak"
    floor: float = DEFAULT_FLOOR
    ceil: float = DEFAULT_CEIL
    time_step: float = DEFAULT_TIME_STEP
    window: float = DEFAULT_WINDOW
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD
    rate: int = PIPELINE_RATE
    n_points: int = N_POINTS


@dataclass
class Discard:
    token_id: str
    reason: str
    detail: str = ""


@dataclass
class AnalysisRun:
    """Record of one analyze run: config, inputs, outputs, and counts."""

    config: dict
    manifest_path: str
    manifest_sha256: str
    outputs: dict[str, str]
    n_ingested: int
    n_analyzed: int
    n_discarded: int
    discards: list[Discard] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def analyze_token(
    audio_path: str, meta: TokenMeta, config: AnalyzeConfig
) -> NormalizedTrajectory | Discard:
    """Run load -> resample -> gate -> track -> normalize for one token."""
    try:
        clip = load_wav(audio_path, token_id=meta.token_id)
    except (AudioFormatError, UnsupportedCodecError, EmptyAudioError, OSError) as exc:
        return Discard(meta.token_id, REASON_LOAD_ERROR, str(exc))
    clip = resample(clip, config.rate)
    gated = amplitude_gate(
        clip, GateConfig(threshold_db=config.gate_db, reference=config.gate_reference)
    )
    if len(gated) == 0:
        return Discard(meta.token_id, REASON_EMPTY_AFTER_GATE, "no samples above gate")
    try:
        track = track_pitch(
            gated,
            floor=config.floor,
            ceil=config.ceil,
            time_step=config.time_step,
            window=config.window,
            voicing_threshold=config.voicing_threshold,
        )
    except TooShortError as exc:
        return Discard(meta.token_id, REASON_TOO_SHORT, str(exc))
    traj = normalize_trajectory(
        track, meta=meta, n_points=config.n_points, f0_min=config.floor, f0_max=config.ceil
    )
    if traj is None:
        return Discard(
            meta.token_id, REASON_INSUFFICIENT_VOICED, "fewer than two voiced frames"
        )
    return traj


def _thread_count(n_tasks: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    threads = os.cpu_count() or 1
    if cap is not None:
        try:
            threads = min(threads, max(1, int(cap)))
        except ValueError as exc:
            raise ToneLensError(f"{THREADS_ENV} must be an integer, got {cap!r}") from exc
    return max(1, min(threads, n_tasks))


def run_analyze(
    manifest_path: str,
    out_csv: str,
    config: Optional[AnalyzeConfig] = None,
    run_path: Optional[str] = None,
) -> AnalysisRun:
    """Analyze every manifest token and write the trajectory CSV.

    Tokens are processed in manifest order (parallel workers capped by the
    TONELENS_THREADS environment variable; output order is unaffected).
    Raises :class:`ZeroSuccessError` when no token yields a trajectory.
    """
    if config is None:
        config = AnalyzeConfig()
    entries = scan_manifest(manifest_path)
    seen: set[str] = set()
    for meta, _ in entries:
        if meta.token_id in seen:
            raise ManifestError(f"duplicate token_id {meta.token_id!r} in manifest")
        seen.add(meta.token_id)

    n_threads = _thread_count(len(entries))
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(
                pool.map(lambda e: analyze_token(e[1], e[0], config), entries)
            )
    else:
        results = [analyze_token(path, meta, config) for meta, path in entries]

    trajectories = [r for r in results if isinstance(r, NormalizedTrajectory)]
    discards = sorted(
        (r for r in results if isinstance(r, Discard)), key=lambda d: d.token_id
    )
    if trajectories:
        write_trajectory_csv(trajectories, out_csv)

    with open(manifest_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    run = AnalysisRun(
        config=asdict(config),
        manifest_path=manifest_path,
        manifest_sha256=digest,
        outputs={"trajectory_csv": out_csv} if trajectories else {},
        n_ingested=len(entries),
        n_analyzed=len(trajectories),
        n_discarded=len(discards),
        discards=discards,
    )
    if run_path is not None:
        # written even when the run fails, so every discard stays accounted for
        run.outputs["run_json"] = run_path
        with open(run_path, "w", encoding="utf-8") as fh:
            fh.write(run.to_json())
    if not trajectories:
        raise ZeroSuccessError(f"no token out of {len(entries)} produced a trajectory")
    return run
