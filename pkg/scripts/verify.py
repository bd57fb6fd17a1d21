"""scripts.verify

Runs verification suites and writes the report.

Usage:
  python -m scripts.verify all
  python -m scripts.verify noether-translation --config data/suites/default.json --set seed=7
  python -m scripts.verify covariance --set dims.n_dims=4 --format human --out covariance.txt

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 invalid config.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from app.config import Settings
from app.env_loader import load_env
from app.errors import ConfigError, UsageError, ValidationError
from app.main import build_runner
from app.suite_config import load_config_document

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INVALID = 3


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Run gauge-field verification suites.")
    ap.add_argument("suite", help="suite name, noether-<kind>, or all")
    ap.add_argument("--config", help="suite config document (JSON or YAML); defaults to data/suites/default.json")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE",
                    help="override a config value, e.g. --set seed=7 --set tolerances.trace=1e-11")
    ap.add_argument("--kind", help="flux kind, shorthand for the noether-<kind> suite name")
    ap.add_argument("--workers", type=int, default=settings.workers)
    ap.add_argument("--format", choices=["json", "csv", "human"], default=settings.output_format)
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--debug", action="store_true", default=settings.debug, help="embed traces in the report")
    ap.add_argument("--compare", action="store_true", help="omit wall time so reports compare byte for byte")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_env()  # load .env if present
    settings = Settings.load()
    args = build_parser(settings).parse_args(argv)

    suite = args.suite
    if args.kind:
        if suite != "noether":
            print("--kind only applies to the noether suite", file=sys.stderr)
            return EXIT_USAGE
        suite = f"noether-{args.kind}"
    if args.workers < 1:
        print("--workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    runner = build_runner(settings, workers=args.workers)
    try:
        doc = load_config_document(args.config)
        report = runner.run(suite, doc, args.overrides, debug=args.debug)
        text = runner.emit(report, args.format, compare=args.compare)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ConfigError) as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_INVALID

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
