import pytest
from hypothesis import given, settings

from phasestar import bidiff as bd
from phasestar.errors import BracketNotDivisibleError
from phasestar.phasepoly import PhasePoly
from phasestar.scalars import HBAR, I, S

from conftest import damped_gen, moyal_gen, oracle_star, phasepolys, sym_equal, to_sympy

q, p = PhasePoly.q(), PhasePoly.p()
STAR = bd.moyal_star(8)


def test_canonical_commutator():
    assert STAR.apply(q, p) - STAR.apply(p, q) == PhasePoly(I * HBAR)


@settings(max_examples=15)
@given(phasepolys(), phasepolys())
def test_moyal_matches_direct_differentiation(f, g):
    assert sym_equal(to_sympy(STAR.apply(f, g)), oracle_star(f, g, moyal_gen, 6))


@settings(max_examples=10)
@given(phasepolys(2), phasepolys(2))
def test_damped_matches_direct_differentiation(f, g):
    assert sym_equal(to_sympy(bd.damped_star(order=4).apply(f, g)), oracle_star(f, g, damped_gen, 4))


@given(phasepolys(2), phasepolys(2), phasepolys(2))
def test_moyal_associative(f, g, h):
    assert bd.associativity_check(STAR, f, g, h)


def test_associativity_needs_order():
    with pytest.raises(ValueError):
        bd.associativity_check(bd.moyal_star(2), q * q, p * p, q)


def test_moyal_hermitian_and_transpose():
    assert STAR.is_hermitian()
    assert STAR.transpose().transpose() == STAR
    assert not STAR.is_symmetric()


def test_damped_not_hermitian():
    sg = bd.damped_star(order=6)
    assert not sg.is_hermitian()
    assert sg.substitute_param("gamma", 0) == bd.moyal_star(6)


@pytest.mark.parametrize("order", [3, 7, 9])
def test_sine_series(order):
    assert bd.moyal_bracket_op(bd.moyal_star(order)) == bd.sine_bracket_series(order)


def test_bracket_requires_hbar():
    with pytest.raises(BracketNotDivisibleError):
        bd.moyal_bracket_op(bd.BiDiffOp.identity() + bd.LQ)


def test_bracket_of_symmetric_is_zero():
    assert bd.moyal_bracket_op(bd.BiDiffOp.identity(4)).is_zero()


def test_exp_series_rejects_constant():
    with pytest.raises(ValueError):
        bd.exp_series(bd.BiDiffOp.identity(), 3)


def test_classical_limit_of_damped_bracket_is_poisson():
    assert bd.moyal_bracket_op(bd.damped_star(order=8)).classical_limit() == bd.poisson_op()


def test_truncate_and_order():
    assert STAR.truncate(2).max_order() == 2
    assert (bd.LQ * bd.RP).scale(S(3)).coeff(1, 0, 0, 1) == S(3)
