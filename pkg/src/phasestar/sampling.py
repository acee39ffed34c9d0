"""Seeded random generators for polynomials, transition series and local operators."""

from __future__ import annotations

import random

from .localtrans import LocalDiffOp
from .phasepoly import PhasePoly
from .scalars import HBAR, I, ZERO, ParamScalar
from .transition import DiffOpSeries


def rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_phasepoly(r: random.Random, max_degree: int = 5, lo: int = -9, hi: int = 9, density: float = 0.6) -> PhasePoly:
    """Integer-coefficient polynomial of total degree <= max_degree (never zero)."""
    terms = {}
    for n in range(max_degree + 1):
        for m in range(max_degree + 1 - n):
            if r.random() < density:
                c = r.randint(lo, hi)
                if c:
                    terms[(n, m)] = ParamScalar(c)
    if not terms:
        terms[(0, 0)] = ParamScalar(r.choice([c for c in range(lo, hi + 1) if c]))
    return PhasePoly(terms)


def random_hbar_poly(r: random.Random, max_power: int = 2, lo: int = -3, hi: int = 3, constant: bool = True, gaussian: bool = False) -> ParamScalar:
    """sum_k c_k hbar^k with small integer (or Gaussian-integer) c_k."""
    out = ZERO
    for k in range(0 if constant else 1, max_power + 1):
        c = ParamScalar(r.randint(lo, hi))
        if gaussian:
            c = c + I * r.randint(lo, hi)
        out = out + c * HBAR ** k
    return out


def random_transition(
    r: random.Random,
    max_order: int = 4,
    t0_one: bool = False,
    gaussian: bool = False,
    density: float = 0.5,
) -> DiffOpSeries:
    """T = 1 + sum c_mn(hbar) dq^m dp^n over 1 <= m + n <= max_order.

    With ``t0_one`` every c_mn vanishes at hbar = 0, so T_0 = 1.  The result
    is guaranteed to differ from 1 and, for ``t0_one=False``, to have T_0 != 1.
    """
    while True:
        terms = {(0, 0): ParamScalar(1)}
        for s in range(1, max_order + 1):
            for m in range(s + 1):
                if r.random() < density:
                    c = random_hbar_poly(r, constant=not t0_one, gaussian=gaussian)
                    if c:
                        terms[(m, s - m)] = c
        T = DiffOpSeries(terms)
        if len(T.terms) == 1:
            continue
        has_classical = any(c.hbar_limit() for k, c in T.terms.items() if k != (0, 0))
        if t0_one or has_classical:
            return T


def random_nilpotent_theta(r: random.Random, max_order: int = 3, coeff_degree: int = 2, lo: int = -3, hi: int = 3) -> LocalDiffOp:
    """theta with q-only coefficients and at least one d_p per term: nilpotent on polynomials."""
    terms = []
    while not terms:
        for s in range(1, max_order + 1):
            for n in range(1, s + 1):
                if r.random() < 0.5:
                    c = PhasePoly({(k, 0): r.randint(lo, hi) for k in range(coeff_degree + 1)})
                    if c:
                        terms.append((c, s - n, n))
    return LocalDiffOp(terms)


def random_local_op(r: random.Random, max_order: int = 4, coeff_degree: int = 2, lo: int = -3, hi: int = 3) -> LocalDiffOp:
    """General exact-flavour operator with polynomial coefficients."""
    terms = []
    for s in range(max_order + 1):
        for m in range(s + 1):
            if r.random() < 0.4:
                terms.append((random_phasepoly(r, coeff_degree, lo, hi), m, s - m))
    if not terms:
        terms.append((PhasePoly(1), 0, 0))
    return LocalDiffOp(terms)
