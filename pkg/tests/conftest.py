import random

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from phasestar.parsefmt import to_text
from phasestar.phasepoly import PhasePoly
from phasestar.scalars import ParamScalar

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# symbols for the sympy oracle
q, p, q1, p1, q2, p2 = sp.symbols("q p q1 p1 q2 p2")
hbar, gamma, m, omega, eta, sigma = sp.symbols("hbar gamma m omega eta sigma")
SYMS = {"q": q, "p": p, "hbar": hbar, "gamma": gamma, "m": m, "omega": omega,
        "eta": eta, "sigma": sigma, "i": sp.I}


def to_sympy(x):
    """Independent route back to sympy via the printed text."""
    return sp.sympify(to_text(x).replace("^", "**"), locals=SYMS)


def sym_equal(a, b) -> bool:
    return sp.simplify(sp.expand(a - b)) == 0


def oracle_exprs(fs, gs, gen, order):
    """exp(gen) acting on f(q1,p1) g(q2,p2), then q1=q2=q, p1=p2=p.

    ``gen`` maps a sympy expression in (q1,p1,q2,p2) to another; the series
    stops once a term vanishes or ``order`` is reached.
    """
    F = fs.subs({q: q1, p: p1}, simultaneous=True) * gs.subs({q: q2, p: p2}, simultaneous=True)
    total, term = F, F
    for n in range(1, order + 1):
        term = sp.expand(gen(term) / n)
        if term == 0:
            break
        total += term
    return sp.expand(total.subs({q1: q, q2: q, p1: p, p2: p}))


def oracle_star(f, g, gen, order):
    return oracle_exprs(to_sympy(f), to_sympy(g), gen, order)


def moyal_gen(F):
    return sp.I * hbar / 2 * (sp.diff(F, q1, p2) - sp.diff(F, p1, q2))


def damped_gen(F):
    return moyal_gen(F) - sp.I * hbar * gamma * m * sp.diff(F, p1, p2)


def antidamped_gen(F):
    return moyal_gen(F) + sp.I * hbar * gamma * m * sp.diff(F, p1, p2)


@st.composite
def phasepolys(draw, max_degree=3, lo=-5, hi=5):
    terms = draw(st.dictionaries(
        st.tuples(st.integers(0, max_degree), st.integers(0, max_degree)).filter(lambda t: sum(t) <= max_degree),
        st.integers(lo, hi), max_size=6))
    return PhasePoly({k: ParamScalar(v) for k, v in terms.items() if v})


@st.composite
def rationals(draw, lo=-20, hi=20):
    from fractions import Fraction

    return Fraction(draw(st.integers(lo, hi)), draw(st.integers(1, 9)))


@pytest.fixture
def r():
    return random.Random(1234)
