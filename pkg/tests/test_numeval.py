import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from phasestar import numeval as ne
from phasestar.errors import SingularPointError
from phasestar.parsefmt import parse_phasepoly

q, p = ne.Q, ne.P
F = ne.arctan(q / p) * ne.ln(q * q + p * p) + q ** 3 / (1 + p * p)
qs, ps = sp.symbols("q p")
FS = sp.atan(qs / ps) * sp.log(qs ** 2 + ps ** 2) + qs ** 3 / (1 + ps ** 2)

points = st.tuples(st.floats(-2, 2), st.floats(0.3, 2))


@settings(max_examples=20)
@given(points, st.integers(0, 3), st.integers(0, 3))
def test_symbolic_derivatives_match_sympy(pt, a, b):
    q0, p0 = pt
    want = float(sp.diff(FS, qs, a, ps, b).subs({qs: q0, ps: p0})) if a or b else float(FS.subs({qs: q0, ps: p0}))
    assert F.derivative(a, b).value(q0, p0) == pytest.approx(want, rel=1e-9, abs=1e-9)


@settings(max_examples=20)
@given(points)
def test_jet_matches_symbolic(pt):
    q0, p0 = pt
    jet = ne.eval_jet(F, q0, p0, k=4)
    for a in range(5):
        for b in range(5 - a):
            assert jet.partial(a, b) == pytest.approx(F.derivative(a, b).value(q0, p0), rel=1e-8, abs=1e-8)


def test_jet_poisson():
    f = ne.eval_jet(q * q * p, 0.7, 1.1, k=3)
    g = ne.eval_jet(p * p / 2 + q * q / 2, 0.7, 1.1, k=3)
    # {q^2 p, H} = 2qp * p - q^2 * q
    assert ne.jet_poisson(f, g).value == pytest.approx(2 * 0.7 * 1.1 ** 2 - 0.7 ** 3)


def test_folding_and_params():
    assert (q * 0 + 1) == ne.const(1)
    e = ne.param("gamma") * p
    assert e.free_parameters() == {"gamma"}
    assert e.substitute({"gamma": 2}).value(0.0, 3.0) == 6.0


def test_singular_points():
    e = ne.ln(q * q)
    vals, bad = e.evaluate(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
    assert bad.tolist() == [True, False]
    with pytest.raises(SingularPointError):
        (1 / q).value(0.0, 1.0)


def test_sample_points_deterministic():
    a = ne.sample_points(50, 7)
    b = ne.sample_points(50, 7)
    assert np.array_equal(a[0], b[0]) and np.all(np.abs(a[1]) >= ne.P_FLOOR)


def test_numeric_identity_check():
    lhs = ne.arctan(q / p) + ne.arctan(p / q)
    rep = ne.numeric_identity_check(lhs * lhs, ne.const(math.pi ** 2 / 4), samples=200, tol=1e-12)
    # arctan(x) + arctan(1/x) = +-pi/2
    assert rep.passed and rep.samples == 200
    assert not ne.numeric_identity_check(q, p, samples=10).passed


def test_from_phasepoly():
    f = parse_phasepoly("q^2*p - 3*m")
    assert ne.from_phasepoly(f).value(2.0, 1.0, {"m": 1}) == pytest.approx(1.0)


@pytest.mark.parametrize("text", ["1", "q^4", "q^3*p^3 - 2*q*p^2", "p^6"])
def test_coarse_grain(text):
    assert ne.gaussian_coarse_grain_check(parse_phasepoly(text), 0.8, 1.3).passed


def test_coarse_grain_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ne.gaussian_coarse_grain_check(parse_phasepoly("q"), -1.0, 1.0)
