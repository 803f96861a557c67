"""ciwgan-lab command line: train | generate | tap."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import LabError
from .generate import LayerTapConfig, extract_layer_audio, generate
from .latent import LatentSpec
from .train import TrainConfig, train


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ciwgan-lab",
        description="Toy-scale categorical waveform GAN: train, generate, tap layers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train on a WAV directory + manifest")
    tr.add_argument("--manifest", required=True, help="JSON Lines training manifest")
    tr.add_argument("--data", default=None,
                    help="unused when manifest paths are absolute or manifest-relative")
    tr.add_argument("--steps", type=int, default=2000)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--ckpt", required=True, help="checkpoint directory")
    tr.add_argument("--batch-size", type=int, default=64)
    tr.add_argument("--model-size", type=int, default=64)
    tr.add_argument("--z-dim", type=int, default=96)
    tr.add_argument("--checkpoint-interval", type=int, default=500)

    ge = sub.add_parser("generate", help="export n_z x 4 WAVs + manifest")
    ge.add_argument("--ckpt", required=True, help="checkpoint file")
    ge.add_argument("--n-z", type=int, required=True)
    ge.add_argument("--scale", type=float, default=2.0)
    ge.add_argument("--seed", type=int, default=0)
    ge.add_argument("--model-id", default=None)
    ge.add_argument("--out", required=True)

    ta = sub.add_parser("tap", help="export channel-averaged layer audio")
    ta.add_argument("--ckpt", required=True, help="checkpoint file")
    ta.add_argument("--layers", default="2,3,4", help="comma-separated subset of 2,3,4")
    ta.add_argument("--n-z", type=int, required=True)
    ta.add_argument("--scale", type=float, default=2.0)
    ta.add_argument("--seed", type=int, default=0)
    ta.add_argument("--model-id", default=None)
    ta.add_argument("--out", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            config = TrainConfig(
                steps=args.steps,
                seed=args.seed,
                batch_size=args.batch_size,
                model_size=args.model_size,
                checkpoint_interval=args.checkpoint_interval,
            )
            spec = LatentSpec(z_dim=args.z_dim)
            result = train(args.manifest, args.ckpt, config=config, spec=spec)
            print(
                f"trained {result.steps_completed} steps; q-loss "
                f"{result.q_loss_start:.4f} -> {result.q_loss_end:.4f}; "
                f"checkpoint {result.checkpoint_path}"
            )
        elif args.command == "generate":
            manifest = generate(
                args.ckpt, args.n_z, args.out, scale=args.scale,
                seed=args.seed, model_id=args.model_id,
            )
            print(f"generated {args.n_z * 4} files -> {manifest}")
        else:
            layers = tuple(int(x) for x in args.layers.split(",") if x.strip())
            manifests = extract_layer_audio(
                args.ckpt, args.n_z, args.out, taps=LayerTapConfig(layers=layers),
                scale=args.scale, seed=args.seed, model_id=args.model_id,
            )
            total = args.n_z * 4 * len(manifests)
            print(f"tapped layers {sorted(manifests)}: {total} files -> {args.out}")
        return 0
    except LabError as exc:
        print(f"ciwgan-lab {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
