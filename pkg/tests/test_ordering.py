import pytest
from hypothesis import given, settings

from phasestar import ordering as od
from phasestar.phasepoly import PhasePoly
from phasestar.scalars import HBAR, I

from conftest import phasepolys

Q, P = od.NCPoly.letter("Q"), od.NCPoly.letter("P")


def test_heisenberg_rewrite():
    assert od.normal_order(P * Q) == Q * P - od.NCPoly.scalar(I * HBAR)
    assert od.normal_order(Q * P - P * Q) == od.NCPoly.scalar(I * HBAR)


def test_weyl_small():
    assert od.normal_order(od.weyl_quantize(1, 1)) == Q * P - od.NCPoly.scalar(I * HBAR / 2)
    assert str(od.normal_order(od.weyl_quantize(2, 1))) == "Q^2*P - i*hbar*Q"


@pytest.mark.parametrize("n,m", [(n, m) for n in range(5) for m in range(5) if n + m <= 6])
def test_weyl_binomial_matches_permutation_average(n, m):
    assert od.normal_order(od.weyl_quantize(n, m)) == od.normal_order(od.weyl_permutation_average(n, m))


def test_hermiticity():
    for n in range(4):
        for m in range(4):
            assert od.normal_order(od.weyl_quantize(n, m)).is_hermitian()
            assert od.normal_order(od.bj_quantize(n, m)).is_hermitian()
            std = od.normal_order(od.std_quantize(n, m))
            assert std.is_hermitian() == (n == 0 or m == 0)


def test_standard_is_q_first():
    assert od.normal_order(od.std_quantize(2, 3)) == od.NCPoly.normal_monomial(2, 3)
    assert od.normal_order(od.std_quantize(2, 3)).is_normal()


def test_born_jordan_differs_from_weyl_at_q2p2():
    assert od.normal_order(od.bj_quantize(1, 1)) == od.normal_order(od.weyl_quantize(1, 1))
    assert od.normal_order(od.bj_quantize(2, 2)) != od.normal_order(od.weyl_quantize(2, 2))


def test_transition_relation_direction():
    assert od.ordering_transition_check(1, 1, "standard")
    assert not od.ordering_transition_check(1, 1, "standard", relation="inverse")
    assert od.ordering_transition_check(2, 2, "born-jordan")
    assert not od.ordering_transition_check(2, 2, "born-jordan", relation="inverse")
    with pytest.raises(ValueError):
        od.ordering_transition_check(1, 1, "weyl")


@settings(max_examples=20)
@given(phasepolys(3))
def test_weyl_round_trip(f):
    assert od.weyl_dequantize(od.weyl_quantize_poly(f)) == f


@settings(max_examples=15)
@given(phasepolys(2), phasepolys(2))
def test_homomorphism(f, g):
    assert od.homomorphism_check(f, g)


@settings(max_examples=15)
@given(phasepolys(3))
def test_symbol_of_inverts_quantize(f):
    for name in ("born-jordan", "standard"):
        assert od.symbol_of(od.quantize_poly(f, name), name) == f


def test_adjoint_reverses_words():
    A = (Q * P).scale(I)
    assert A.adjoint() == (P * Q).scale(-I)


def test_negative_exponents_rejected():
    with pytest.raises(ValueError):
        od.weyl_quantize(-1, 2)


def test_monomial_dequantize():
    assert od.weyl_dequantize(od.NCPoly.normal_monomial(1, 1)) == PhasePoly.q() * PhasePoly.p() + PhasePoly(I * HBAR / 2)
