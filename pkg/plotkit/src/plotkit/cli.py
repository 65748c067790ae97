"""plotkit FIGURE_KIND --in DIR --out FILE"""

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="figures from chemolab run artifacts")
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure kind")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="run directory (or sweep root for sweep_energy)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--logx", action="store_true", help="log-scale x axis where applicable")
    parser.add_argument("--logy", action="store_true", help="log-scale y axis where applicable")
    args = parser.parse_args(argv)

    spec = FigureSpec(kind=args.kind, in_dir=Path(args.in_dir), out_path=Path(args.out),
                      logx=args.logx, logy=args.logy)
    try:
        info = render(spec)
    except SchemaError as exc:
        print(f"input schema error: {exc}", file=sys.stderr)
        return 2
    summary = ", ".join(f"{k}={v}" for k, v in info.items() if k != "out")
    print(f"wrote {info['out']} ({summary})")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
