"""Command-line entry points: curriculum training and inference.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import NeuralBfError
from .network import NetworkConfig
from .train import CurriculumStage, default_curriculum, train


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_stage(text):
    # KIND:LR:EPOCHS, e.g. mse:1e-3:25
    try:
        kind, lr, epochs = text.split(":")
        return CurriculumStage(kind, float(lr), int(epochs))
    except (ValueError, TypeError) as exc:
        raise _UsageError(f"bad --stage {text!r}: {exc}") from None


def _cmd_train(args):
    stages = ([_parse_stage(s) for s in args.stage] if args.stage
              else default_curriculum())
    config = NetworkConfig(in_channels=args.in_channels, levels=args.levels,
                           base_filters=args.base_filters)
    ckpt, history = train(args.manifest, stages, config, args.out,
                          seed=args.seed, batch_size=args.batch_size,
                          val_fraction=args.val_fraction)
    last = history[-1]
    print(f"checkpoint: {ckpt} (final train loss {last['train_loss']:.6g})")
    return 0


def _cmd_infer(args):
    from .infer import infer_file
    infer_file(args.checkpoint, args.infile, args.out)
    return 0


def _build_parser():
    parser = _Parser(prog="neuralbf")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--in-channels", type=int, default=128)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--base-filters", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=2)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--stage", action="append",
                   help="KIND:LR:EPOCHS, repeat for each stage")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("infer")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_infer)
    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NeuralBfError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
