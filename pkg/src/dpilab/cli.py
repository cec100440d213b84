"""Command-line driver.

``dpilab <suite> [--config FILE] [--seed N] [--jobs K] [--out DIR]
[--format json,csv]`` runs a suite in-process through the same runner the
service's /experiments endpoint uses and exits 0 when every case passed,
2 when a case failed (writing a failure manifest), and 1 on a config or
numerical error.  ``dpilab serve`` starts the HTTP service.

Flags override config fields; the DPILAB_SEED environment variable fills in
the seed when neither a flag nor the config provides one.  Without --out the
report is printed to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from pydantic import ValidationError

from .errors import CapabilityError, ConfigError, DomainError, NumericalError
from .schemas import SUITES, ExperimentConfig
from .suites import emit_report, run_experiment

_RUNNABLE = tuple(s for s in SUITES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpilab",
        description="divergence-power inequality checks: suite batteries and an HTTP service",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="{%s,serve}" % ",".join(_RUNNABLE))
    for suite in _RUNNABLE:
        sp = sub.add_parser(suite, help=f"run the {suite} suite")
        sp.add_argument("--config", help="JSON experiment config; flags override its fields")
        sp.add_argument("--seed", type=int, help="root seed (fallback: DPILAB_SEED, then 0)")
        sp.add_argument("--jobs", type=int, help="concurrent case limit")
        sp.add_argument("--out", help="directory for report files")
        sp.add_argument("--format", help="comma-separated output formats: json,csv")
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config!r} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {args.config!r} must hold a JSON object")
    data["suite"] = args.command
    if args.seed is not None:
        data["seed"] = args.seed
    elif "seed" not in data and os.environ.get("DPILAB_SEED"):
        raw = os.environ["DPILAB_SEED"]
        try:
            data["seed"] = int(raw)
        except ValueError as exc:
            raise ConfigError(f"DPILAB_SEED must be an integer, got {raw!r}") from exc
    if args.jobs is not None:
        data["jobs"] = args.jobs
    if args.out is not None:
        data["out"] = args.out
    if args.format is not None:
        data["formats"] = [part.strip() for part in args.format.split(",") if part.strip()]
    return ExperimentConfig.model_validate(data)


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(piece) for piece in err["loc"]) or "<config>"
        parts.append(f"{loc}: {err['msg']}")
    return "config error: " + "; ".join(parts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"dpilab: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"dpilab: {_validation_message(exc)}", file=sys.stderr)
        return 1
    try:
        report = run_experiment(config)
    except (ConfigError, DomainError, CapabilityError, NumericalError) as exc:
        print(f"dpilab: {exc}", file=sys.stderr)
        return 1
    try:
        if config.out:
            for path in emit_report(report, config.out, config.formats):
                print(path)
        else:
            print(json.dumps(report, indent=2))
    except OSError as exc:
        print(f"dpilab: cannot write report: {exc}", file=sys.stderr)
        return 1
    if not report["passed"]:
        if not config.out:
            print(json.dumps({"failures": report["failures"]}, indent=2), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
