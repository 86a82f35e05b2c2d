#!/usr/bin/env python3
"""Sample the confidence-weighting curve family and render it.

Writes the (p, confidence) samples as CSV and, when matplotlib is
available, a PNG of the five standard curves.
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from persona.beliefs import WeightingParams, probability_to_confidence

PAIRS = ((0.5, 1.0), (0.5, 2.0), (0.5, 3.0), (0.3, 3.0), (0.7, 3.0))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=REPO / "out" / "weighting")
    parser.add_argument("--step", type=float, default=0.001)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    steps = round(1.0 / args.step)
    rows = ["s,r,p,confidence"]
    curves = {}
    for s, r in PAIRS:
        params = WeightingParams(s, r)
        ps, sigmas = [], []
        for i in range(steps + 1):
            p = min(i * args.step, 1.0)
            sigma = probability_to_confidence(p, params)
            rows.append(f"{s:g},{r:g},{p:.6g},{sigma:.12g}")
            ps.append(p)
            sigmas.append(sigma)
        curves[(s, r)] = (ps, sigmas)
    (args.out / "weighting_curves.csv").write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out / 'weighting_curves.csv'}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib unavailable; skipped the figure")
        return 0

    fig, ax = plt.subplots(figsize=(5, 4))
    for (s, r), (ps, sigmas) in curves.items():
        ax.plot(ps, sigmas, label=f"s={s:g}, r={r:g}")
    ax.set_xlabel("probability")
    ax.set_ylabel("confidence")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out / "weighting_curves.png", dpi=150)
    print(f"wrote {args.out / 'weighting_curves.png'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
