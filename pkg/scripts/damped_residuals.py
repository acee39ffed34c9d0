"""Sampled augmentation residuals of the local damped-oscillator operator over a gamma sweep."""

import argparse
from fractions import Fraction

import numpy as np

from phasestar import numeval as ne
from phasestar.localtrans import ansatz_augmentation, augmentation, damped_theta, sho_expr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=ne.DEFAULT_SEED)
    ap.add_argument("--gammas", default="0,1/1000,1/100,1/10,1/2")
    args = ap.parse_args()

    q, p = ne.sample_points(args.samples, args.seed)
    H = sho_expr(1, 1)
    print(f"{'gamma':>8} {'route':>8} {'max|A(q)|':>12} {'max|A(p)+2gp|/max(1,|p|)':>26}")
    for g in (Fraction(x) for x in args.gammas.split(",")):
        th = damped_theta(1, 1, g)
        for name, route in (("general", augmentation), ("ansatz", ansatz_augmentation)):
            Aq, bq = route(th, H, "q").evaluate(q, p)
            Ap, bp = route(th, H, "p").evaluate(q, p)
            ok = ~(bq | bp)
            rq = np.abs(Aq[ok]).max()
            rp = (np.abs(Ap[ok] + 2 * float(g) * p[ok]) / np.maximum(1, np.abs(p[ok]))).max()
            print(f"{str(g):>8} {name:>8} {rq:12.2e} {rp:26.2e}")


if __name__ == "__main__":
    main()
