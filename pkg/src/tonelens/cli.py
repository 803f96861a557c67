"""tonelens command line: analyze | gam | correlate | report."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, ToneLensError, ZeroSuccessError
from .gam import GamSpec, fit_gam
from .pipeline import AnalyzeConfig, run_analyze
from .report import correlation_summary, gam_summary, run_report, write_json
from .stats import trajectory_correlation
from .trajectory import ONSET_FRACTION, read_trajectory_csv

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tonelens",
        description="Measure, model, and compare F0 trajectories of tonal speech.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="manifest -> trajectory CSV")
    analyze.add_argument("--manifest", required=True, help="JSON Lines token manifest")
    analyze.add_argument("--out", required=True, help="trajectory CSV to write")
    analyze.add_argument("--run-out", default=None, help="run record JSON (default <out>.run.json)")
    analyze.add_argument("--gate-db", type=float, default=-30.0)
    analyze.add_argument("--gate-reference", choices=("peak", "full_scale"), default="peak")
    analyze.add_argument("--floor", type=float, default=60.0)
    analyze.add_argument("--ceil", type=float, default=350.0)
    analyze.add_argument("--time-step", type=float, default=0.01)
    analyze.add_argument("--window", type=float, default=0.04)
    analyze.add_argument("--voicing-threshold", type=float, default=0.45)
    analyze.add_argument("--rate", type=int, default=16000)
    analyze.add_argument("--n-points", type=int, default=50)

    gam = sub.add_parser("gam", help="trajectory CSV -> GAM summary JSON")
    gam.add_argument("--traj", required=True, help="trajectory CSV")
    gam.add_argument("--group", choices=("tone", "c_index"), required=True)
    gam.add_argument("--basis-dim", type=int, default=10)
    gam.add_argument("--lambda-min", type=float, default=1e-4)
    gam.add_argument("--lambda-max", type=float, default=1e6)
    gam.add_argument("--lambda-steps", type=int, default=41)
    gam.add_argument("--out", required=True, help="summary JSON to write")

    corr = sub.add_parser("correlate", help="two trajectory CSVs -> correlation JSON")
    corr.add_argument("--a", required=True, help="first trajectory CSV")
    corr.add_argument("--b", required=True, help="second trajectory CSV")
    corr.add_argument("--out", required=True, help="correlation JSON to write")

    report = sub.add_parser("report", help="artifacts -> SVG plots + summary JSON")
    report.add_argument("--traj", action="append", default=[], help="trajectory CSV (repeatable)")
    report.add_argument("--gam", action="append", default=[], help="GAM summary JSON (repeatable)")
    report.add_argument("--corr", action="append", default=[], help="correlation JSON (repeatable)")
    report.add_argument("--out-dir", required=True)
    report.add_argument("--trim", type=float, default=ONSET_FRACTION,
                        help="onset fraction blanked for natural-token plots")
    return parser


def _cmd_analyze(args) -> int:
    config = AnalyzeConfig(
        gate_db=args.gate_db,
        gate_reference=args.gate_reference,
        floor=args.floor,
        ceil=args.ceil,
        time_step=args.time_step,
        window=args.window,
        voicing_threshold=args.voicing_threshold,
        rate=args.rate,
        n_points=args.n_points,
    )
    run_path = args.run_out if args.run_out is not None else args.out + ".run.json"
    run = run_analyze(args.manifest, args.out, config=config, run_path=run_path)
    print(
        f"analyzed {run.n_analyzed}/{run.n_ingested} tokens "
        f"({run.n_discarded} discarded) -> {args.out}"
    )
    return EXIT_OK


def _cmd_gam(args) -> int:
    records = read_trajectory_csv(args.traj)
    ts, labels, ys = [], [], []
    skipped = 0
    for record in records:
        label = record.tone if args.group == "tone" else (
            None if record.c_index is None else str(record.c_index)
        )
        if label is None or len(record.points) < 2:
            skipped += 1
            continue
        n = len(record.points)
        for idx, value in enumerate(record.points):
            if not np.isnan(value):
                ts.append(idx / (n - 1))
                labels.append(label)
                ys.append(value)
    if not ts:
        raise ParameterError(f"no rows with a {args.group} label and present f0")
    unique = sorted(set(labels))
    code_of = {label: i for i, label in enumerate(unique)}
    codes = np.array([code_of[label] for label in labels])
    spec = GamSpec(
        basis_dim=args.basis_dim,
        lambda_min=args.lambda_min,
        lambda_max=args.lambda_max,
        lambda_steps=args.lambda_steps,
    )
    fit, design = fit_gam(
        np.array(ts), codes, np.array(ys), spec=spec, category_labels=unique
    )
    payload = gam_summary(fit, design, group=args.group)
    payload["config"]["n_tokens_skipped"] = skipped
    write_json(payload, args.out)
    print(
        f"gam: lambda={fit.lam:g} edf={fit.edf:.2f} "
        f"adjusted_r2={fit.adjusted_r2:.4f} n={fit.n_obs} -> {args.out}"
    )
    return EXIT_OK


def _cmd_correlate(args) -> int:
    records_a = read_trajectory_csv(args.a)
    records_b = read_trajectory_csv(args.b)
    result = trajectory_correlation(records_a, records_b)
    write_json(correlation_summary(result), args.out)
    print(
        f"correlate: r={result.r:.4f} ci=[{result.ci_low:.4f}, {result.ci_high:.4f}] "
        f"n={result.n} -> {args.out}"
    )
    return EXIT_OK


def _cmd_report(args) -> int:
    summary = run_report(
        args.traj, args.gam, args.corr, out_dir=args.out_dir, trim_fraction=args.trim
    )
    print(
        f"report: {len(summary['plots'])} plot(s), {len(summary['gam'])} gam, "
        f"{len(summary['correlations'])} correlation(s) -> {args.out_dir}"
    )
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "gam": _cmd_gam,
    "correlate": _cmd_correlate,
    "report": _cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ZeroSuccessError as exc:
        print(f"tonelens {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ParameterError as exc:
        print(f"tonelens {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToneLensError as exc:
        print(f"tonelens {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"tonelens {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
