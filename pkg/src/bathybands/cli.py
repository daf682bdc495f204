"""Command-line entry points.

One subcommand per experiment family:

    bathybands bands     --config cfg.json [--out DIR] [--threads N]
    bathybands gaps      --config cfg.json [--out DIR] [--threads N]
    bathybands predict   --config cfg.json [--out DIR]
    bathybands quasimode --config cfg.json [--out DIR]
    bathybands validate  --config cfg.json [--out DIR]

Exit codes: 0 on success, 1 when a validation/tolerance check fails,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import experiments
from .errors import BathybandsError, ConfigError


def _load_config(args) -> experiments.ExperimentConfig:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {args.config}: {exc}") from exc
    config = experiments.parse_config(text)
    if args.threads is not None:
        config = dataclasses.replace(config, thread_count=args.threads)
    return config


def _out_dir(args, config) -> Path:
    return Path(args.out) if args.out else Path(config.outputs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bathybands",
        description="Band structure and gap analysis of water waves over a periodic bottom",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("bands", "sweep the quasi-momentum and emit band CSV tables and SVG charts"),
        ("gaps", "measure gaps and compare with the closed-form predictions"),
        ("predict", "emit the closed-form gap predictions (no solves)"),
        ("quasimode", "build quasimodes, report residuals and certified eigenvalues"),
        ("validate", "run the analytic invariant suite and report pass/fail"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON configuration")
        cmd.add_argument("--out", default=None, help="output directory (default: config outputs)")
        cmd.add_argument("--threads", type=int, default=None, help="solver fan-out (0 = auto)")

    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        out = _out_dir(args, config)
        if args.command == "bands":
            for path in experiments.run_bands(config, out):
                print(path)
        elif args.command == "gaps":
            path = experiments.run_gaps(config, out)
            print(path)
            report = experiments.read_gap_report(path)
            if not report["all_passed"]:
                return 1
        elif args.command == "predict":
            print(experiments.run_predict(config, out))
        elif args.command == "quasimode":
            print(experiments.run_quasimode(config, out))
        elif args.command == "validate":
            path = experiments.run_validate(config, out)
            print(path)
            report = json.loads(path.read_text())
            for check in report["checks"]:
                status = "pass" if check["passed"] else "FAIL"
                print(f"  [{status}] {check['name']}: {check['measured']:.3e} "
                      f"(tolerance {check['tolerance']:.1e})")
            if not report["all_passed"]:
                return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BathybandsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
