"""Command-line entry point: config-driven experiment runs."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .chemistry import FcidumpError
from .config import ConfigError, load_config, resolve_output_dir
from .engine import EngineError
from .experiments import run_experiment

_SUBCOMMANDS = {
    "dynamics": "observable trajectories (exact, subspace, and shot-sampled)",
    "variance-scan": "observable variance versus shots per component",
    "trotter-scan": "final-state infidelity versus Trotter steps and shots",
    "resource-table": "analytic cost comparison of trajectory strategies",
    "lindep-report": "basis linear-independence diagnostic and overlap sweep",
}


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit int")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qasim",
        description="Subspace quantum-dynamics emulator for small molecules.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, metavar="PATH",
                        help="YAML experiment configuration")
        sp.add_argument("--seed", type=_u64, default=None, metavar="U64",
                        help="override the master seed from the config")
        sp.add_argument("--workers", type=_positive, default=1, metavar="N",
                        help="worker processes for sampling ensembles")
        sp.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (overrides config and "
                             "QASIM_OUT_DIR)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        if cfg.kind != args.command:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match subcommand "
                f"{args.command!r}"
            )
        out_dir = resolve_output_dir(cfg, args.out)
        result = run_experiment(cfg, out_dir, workers=args.workers)
    except (ConfigError, FcidumpError, EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{cfg.kind}: wrote {len(result.outputs)} outputs to {result.out_dir}")
    for path in result.outputs:
        print(f"  {path.name}")
    print(f"  manifest.json  ({result.wall_clock:.1f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
