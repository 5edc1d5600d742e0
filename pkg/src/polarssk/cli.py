"""Command-line driver: ``polarssk --mode {capacity,design,ber} ...``.

Flags mirror the keys of :class:`~polarssk.sim.ExperimentConfig`. A JSON
config file given with ``--config`` supplies defaults and any flag on the
command line overrides it.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .errors import InvalidArgumentError, NumericalError, PolarSskError
from .sim import ExperimentConfig, run

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polarssk",
        description="Design and simulate multilevel polar-coded SSK links.",
    )
    p.add_argument("--config", help="JSON file with config keys (flags override it)")
    p.add_argument("--mode", choices=["capacity", "design", "ber"])
    p.add_argument("--nt", type=int, help="transmit antennas (power of two)")
    p.add_argument("--nr", type=int, help="receive antennas")
    p.add_argument("--n", type=int, help="component code length N per level (power of two)")
    p.add_argument("--bpcu", type=float, help="target spectral efficiency for design mode")
    p.add_argument("--snr-start", type=float, help="first Es/N0 grid point in dB")
    p.add_argument("--snr-stop", type=float, help="last Es/N0 grid point in dB (inclusive)")
    p.add_argument("--snr-step", type=float, help="grid spacing in dB")
    p.add_argument("--frames-max", type=int, help="frame budget per SNR point and arm")
    p.add_argument("--fe-limit", type=int, help="frame errors that end an SNR point")
    p.add_argument("--seed", type=int)
    p.add_argument("--design", help="design JSON read by ber mode")
    p.add_argument("--out", help="output CSV (capacity, ber) or JSON (design)")
    p.add_argument("--arm", choices=["mlc", "bicm", "both"])
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--noise-scale", type=float, help="noise variance per unit N0 (default 0.5)")
    p.add_argument("--noiseless", action="store_true", default=None, help="debug: zero noise at every point")
    p.add_argument("--capacity-frames", type=int, help="Monte-Carlo trials per capacity estimate")
    p.add_argument("--samples", type=int, help="codewords for the reliability construction")
    p.add_argument("--block-frames", type=int, help="frames per simulation block")
    p.add_argument("--fading", choices=["fast", "block"])
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    keys = {f.name for f in fields(ExperimentConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in keys and v is not None}
    if args.config:
        return ExperimentConfig.from_json(args.config, **overrides)
    return ExperimentConfig.from_mapping(overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        result = run(config)
    except InvalidArgumentError as exc:
        print(f"polarssk: invalid argument: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"polarssk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"polarssk: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PolarSskError as exc:
        print(f"polarssk: {exc}", file=sys.stderr)
        return exc.exit_code
    if config.mode == "design" and config.out is None:
        json.dump(result, sys.stdout, indent=1)
        print()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
