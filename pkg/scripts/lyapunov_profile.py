"""Complexified Lyapunov exponent eps -> L(eps) of the almost Mathieu cocycle.

    python3 scripts/lyapunov_profile.py --lam 0.5 2.0 --eps-max 0.2
"""

import argparse

import numpy as np

from arcocycle import almost_mathieu, lyapunov


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--energy", type=float, default=0.0)
    ap.add_argument("--eps-max", type=float, default=0.2)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--n", type=int, default=4000)
    args = ap.parse_args()

    eps = np.linspace(0.0, args.eps_max, args.points)
    print("eps      " + " ".join(f"lam={lam:<8g}" for lam in args.lam))
    cocycles = [almost_mathieu(lam, args.energy) for lam in args.lam]
    for e in eps:
        vals = [lyapunov(c, float(e), args.n) for c in cocycles]
        print(f"{e:<8.4f} " + " ".join(f"{v:<12.6f}" for v in vals))


if __name__ == "__main__":
    main()
