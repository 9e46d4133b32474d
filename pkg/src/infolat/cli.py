"""Command-line entry point: ``infolat <task> --config FILE [--preset NAME] [--out DIR]``."""
from __future__ import annotations

import argparse
import json
import sys

import yaml

from .config import TASKS, merge, validate
from .errors import ConfigError, InfolatError
from .presets import get_preset, preset_names
from .runner import run

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
EXIT_INTERNAL = 5


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infolat", description="Information lattice tools for open fermion chains")
    p.add_argument("task", choices=TASKS + ("presets",), help="task to run, or 'presets' to list presets")
    p.add_argument("--config", help="YAML configuration file (merged over the preset if both are given)")
    p.add_argument("--preset", help="named preset")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    return p


def _error(exc: BaseException, error_class: str, code: int) -> int:
    print(json.dumps({"error_class": error_class, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.task == "presets":
        for name in preset_names():
            print(f"{name}\t{get_preset(name)['task']}\t{get_preset(name).get('description', '')}")
        return 0
    try:
        if not args.config and not args.preset:
            raise ConfigError("either --config or --preset is required")
        raw: dict = {}
        if args.preset:
            raw = get_preset(args.preset)
            raw.pop("task", None)
        if args.config:
            try:
                with open(args.config) as fh:
                    user = yaml.safe_load(fh) or {}
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
            except yaml.YAMLError as exc:
                raise ConfigError(f"invalid YAML in {args.config}: {exc}") from exc
            if not isinstance(user, dict):
                raise ConfigError("configuration must be a mapping")
            raw = merge(raw, user)
        try:
            cfg = validate(raw, args.task)
        except InfolatError as exc:
            # any rejection while reading the configuration is a configuration failure
            return _error(exc, exc.error_class, EXIT_CONFIG)
        manifest = run(cfg, args.out, args.preset)
    except ConfigError as exc:
        return _error(exc, exc.error_class, EXIT_CONFIG)
    except InfolatError as exc:
        return _error(exc, exc.error_class, EXIT_NUMERIC)
    except OSError as exc:
        return _error(exc, "IOError", EXIT_IO)
    except Exception as exc:  # noqa: BLE001
        return _error(exc, type(exc).__name__, EXIT_INTERNAL)
    print(json.dumps({"status": "ok", "task": manifest["task"], "out": args.out}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
