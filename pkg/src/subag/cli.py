"""Command-line front end: subag <mode> --config <path> [--out DIR] [--workers N] [--seed S]."""

from __future__ import annotations

import argparse
import ast
import json
import sys
from pathlib import Path

import yaml

from .config import MODES, ConfigError, ExperimentConfig, config_from_dict, validate
from .presets import PRESETS, _assign, make_preset
from .runner import run


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="YAML/JSON config file (or an emitted manifest.json)")
    sp.add_argument("--preset", help=f"named preset instead of a file: {sorted(PRESETS)}")
    sp.add_argument("--out", default=".", help="output directory (results.csv, manifest.json)")
    sp.add_argument("--workers", type=int, default=1, help="parallel grid-cell workers")
    sp.add_argument("--seed", type=int, help="override base_seed")
    sp.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted config override, e.g. --set replications=5",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subag",
        description="Asymptotic and empirical risk of subagged regularized M-estimators",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        _add_common(sub.add_parser(mode, help=f"run in {mode} mode"))
    _add_common(sub.add_parser("validate", help="report config diagnostics and exit"))
    lp = sub.add_parser("presets", help="list available presets")
    lp.set_defaults(list_presets=True)
    return parser


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, _, raw = pair.partition("=")
        if not key or not raw:
            raise ConfigError("--set", f"expected KEY=VALUE, got {pair!r}")
        try:
            out[key] = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            out[key] = raw
    return out


def _load(args) -> ExperimentConfig:
    overrides = _parse_overrides(args.set)
    if args.config and args.preset:
        raise ConfigError("--config", "use either --config or --preset, not both")
    if args.preset:
        config = make_preset(args.preset, overrides)
    elif args.config:
        tree = yaml.safe_load(Path(args.config).read_text())  # JSON is valid YAML
        if isinstance(tree, dict) and "config" in tree:
            tree = tree["config"]  # accept an emitted manifest
        for dotted, value in overrides.items():
            _assign(tree, dotted, value)
        config = config_from_dict(tree)
    else:
        raise ConfigError("--config", "a config file or preset is required")
    if getattr(args, "mode", None) in MODES and config.mode != args.mode:
        config.mode = args.mode  # the subcommand wins over the file's mode field
        config.__post_init__()
    if args.seed is not None:
        config.base_seed = args.seed
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "list_presets", False):
        print("\n".join(sorted(PRESETS)))
        return 0
    try:
        config = _load(args)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        json.dump({"error": "config", "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    if args.mode == "validate":
        for line in validate(config):
            print(f"warning: {line}")
        print("config ok" if not validate(config) else f"{len(validate(config))} warning(s)")
        return 0
    try:
        return run(config, args.out, workers=args.workers)
    except Exception as exc:  # noqa: BLE001 - report machine-readable and fail
        json.dump({"error": "runtime", "detail": f"{type(exc).__name__}: {exc}"}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
