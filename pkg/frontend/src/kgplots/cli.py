"""CLI: ``plots --spec <json>`` renders one figure per spec file."""

from __future__ import annotations

import argparse
import sys

from kgplots.spec import FigureSpec, SpecError
from kgplots.render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render static figures from kgdamp CSV artifacts",
    )
    parser.add_argument("--spec", required=True, nargs="+",
                        help="path(s) to FigureSpec JSON files")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    status = 0
    for path in args.spec:
        try:
            spec = FigureSpec.from_file(path)
            info = render(spec)
        except SpecError as exc:
            print(f"spec error: {exc}", file=sys.stderr)
            status = 2
            continue
        if args.verbose:
            print(f"wrote {spec.output} {info}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
