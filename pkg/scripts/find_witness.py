"""Search seeds for small witnesses of (a *_g b) *_{-g} c != a *_g (b *_{-g} c)."""

import argparse

from phasestar import bidiff as bd
from phasestar.numeval import DEFAULT_SEED
from phasestar.scalars import S
from phasestar.verify import find_nonassociativity_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--max-degree", type=int, default=3)
    args = ap.parse_args()

    sp, sm = bd.damped_star(S("gamma"), order=9), bd.damped_star(-S("gamma"), order=9)
    best = None
    for s in range(DEFAULT_SEED, DEFAULT_SEED + args.seeds):
        w, tried = find_nonassociativity_witness(s, args.max_degree)
        if w is None:
            print(f"seed {s}: none in {tried} triples")
            continue
        size = sum(len(x.terms) for x in w)
        print(f"seed {s}: witness after {tried} triples, {size} terms")
        if best is None or size < best[0]:
            best = (size, s, w)
    if best is None:
        return
    _, s, (a, b, c) = best
    diff = sm.apply(sp.apply(a, b), c) - sp.apply(a, sm.apply(b, c))
    print(f"\nsmallest (seed {s}):\n  a = {a}\n  b = {b}\n  c = {c}\n  difference = {diff}")


if __name__ == "__main__":
    main()
