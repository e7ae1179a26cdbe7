"""Reduction residual of the almost Mathieu cocycle along golden convergents.

    python3 scripts/convergent_decay.py --lam 0.5 --terms 8 11 --precision extended
"""

import argparse
from fractions import Fraction

from arcocycle import ReductionConfig, almost_mathieu, expand, reduce
from arcocycle.errors import ReductionError


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=0.5)
    ap.add_argument("--energy", type=float, default=0.0)
    ap.add_argument("--eps0", type=float, default=0.05)
    ap.add_argument("--terms", type=int, nargs=2, default=(8, 11),
                    help="range of continued-fraction lengths (inclusive)")
    ap.add_argument("--precision", choices=("double", "extended"), default="double")
    args = ap.parse_args()

    cfg = ReductionConfig.from_eps0(args.eps0, precision=args.precision)
    cf = expand("golden", args.terms[1] + 1)
    print(f"{'p/q':>10} {'case':>14} {'B norm':>10} {'residual':>10}")
    for p, q in cf.convergents[args.terms[0]:args.terms[1] + 1]:
        c = almost_mathieu(args.lam, args.energy, Fraction(p, q))
        try:
            r = reduce(c, cfg)
            print(f"{p:>4}/{q:<5} {r.case:>14} {r.B_norm:10.3e} {r.residual:10.3e}")
        except ReductionError as exc:
            print(f"{p:>4}/{q:<5} {type(exc).__name__:>14} ({exc.lemma})")


if __name__ == "__main__":
    main()
