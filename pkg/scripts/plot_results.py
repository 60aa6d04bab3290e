"""Plot a sweep CSV produced by `irsopt sweep`.

Draws mean weighted sum rate with sample-std error bars per scheme against
the sweep axis and writes a PNG next to the CSV (or to --out).

Usage: python scripts/plot_results.py results.csv [--out figure.png] [--bits]
"""

import argparse
import math
import sys
from pathlib import Path

from irsopt.experiments import read_rows, summarize

SCHEME_STYLE = {
    "proposed": ("o-", "tab:blue"),
    "random_phase": ("s--", "tab:orange"),
    "no_irs": ("^:", "tab:green"),
}
AXIS_LABEL = {"p_max": "transmit power limit (W)",
              "n_elements": "phase shifters per surface"}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", type=Path)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--bits", action="store_true",
                        help="plot bits/s/Hz instead of nats/s/Hz")
    args = parser.parse_args()

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install irsopt[plot]", file=sys.stderr)
        return 1

    rows = read_rows(args.csv)
    if not rows:
        print("no data rows in CSV", file=sys.stderr)
        return 1
    sweep_name = rows[0].sweep_name
    stats = summarize(rows)
    scale = 1.0 / math.log(2.0) if args.bits else 1.0

    fig, ax = plt.subplots(figsize=(5.5, 4))
    schemes = sorted({r.scheme for r in rows},
                     key=lambda s: list(SCHEME_STYLE).index(s) if s in SCHEME_STYLE else 9)
    for scheme in schemes:
        points = sorted((v, stats[(scheme, v)]) for (s, v) in stats if s == scheme)
        xs = [p[0] for p in points]
        means = [scale * p[1][0] for p in points]
        errs = [scale * p[1][1] for p in points]
        style, color = SCHEME_STYLE.get(scheme, ("x-", None))
        ax.errorbar(xs, means, yerr=errs, fmt=style, color=color,
                    capsize=3, label=scheme.replace("_", " "))
    ax.set_xlabel(AXIS_LABEL.get(sweep_name, sweep_name))
    ax.set_ylabel("weighted sum rate "
                  + ("(bits/s/Hz)" if args.bits else "(nats/s/Hz)"))
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()

    out = args.out or args.csv.with_suffix(".png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
