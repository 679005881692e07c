"""fracsource-plots render --trace <csv> --kind <overlay> --out <img>

Exit codes: 0 success, 1 usage, 2 schema validation failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, OverlayKind, render
from .schema import SchemaError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCHEMA = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracsource-plots")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from run artifacts")
    r.add_argument("--trace", required=True,
                   help="trace.csv of a run (index.csv for sweep_panel)")
    r.add_argument("--kind", required=True,
                   choices=[k.value for k in OverlayKind])
    r.add_argument("--out", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    spec = FigureSpec(Path(args.trace), OverlayKind(args.kind), Path(args.out))
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
