import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasestar import bidiff as bd
from phasestar import numeval as ne
from phasestar.errors import ParseError
from phasestar.localtrans import damped_theta
from phasestar.ordering import normal_order, weyl_quantize
from phasestar.parsefmt import (
    parse,
    parse_bidiff,
    parse_diffop,
    parse_expr,
    parse_ncpoly,
    parse_operator,
    parse_phasepoly,
    parse_scalar,
    to_text,
)
from phasestar.phasepoly import PhasePoly, sho_hamiltonian
from phasestar.sampling import random_local_op, random_transition, rng
from phasestar.scalars import HBAR, I, S

from conftest import phasepolys, rationals


def test_sho_text():
    assert parse_phasepoly("p^2/(2*m) + m*omega^2*q^2/2") == sho_hamiltonian()


def test_operator_term():
    op = parse_operator("q*dp")
    assert op.exact and set(op.terms) == {(0, 1)} and op.coeff(0, 1) == PhasePoly.q()


def test_derivative_must_be_rightmost():
    with pytest.raises(ParseError, match="coefficient appears right of a derivative symbol"):
        parse_operator("q + dq*p")


@pytest.mark.parametrize("text", ["q*", "q + dq", "q^p", "q^(1/2)", "2 3", "ln(q)", "(q", "q/p"])
def test_phasepoly_errors_carry_spans(text):
    with pytest.raises(ParseError) as info:
        parse_phasepoly(text)
    a, b = info.value.span
    assert 0 <= a <= b <= len(text)


def test_unary_minus_binds_looser_than_power():
    assert parse_phasepoly("-q^2") == PhasePoly.q().scale(-1) * PhasePoly.q()
    assert parse_scalar("-2^2") == S(-4)


def test_canonical_prints():
    assert to_text(bd.moyal_star(2).apply(PhasePoly.q(), PhasePoly.p())) == "q*p + (1/2)*i*hbar"
    assert to_text(PhasePoly()) == "0"
    assert to_text(bd.damped_poisson()) == "lq*rp - lp*rq - 2*gamma*m*lp*rp"
    assert to_text(parse_scalar("1/(2*m)")) == "1/(2*m)"
    assert to_text(parse_scalar("(m+1)/(m-1)")) == "(m + 1)/(m - 1)"


@given(phasepolys(4, -50, 50), rationals())
def test_phasepoly_round_trip(f, c):
    f = f.scale(S(c) * (1 + I * HBAR) / S("m"))
    assert parse_phasepoly(to_text(f)) == f


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_operator_round_trips(seed):
    r = rng(seed)
    T = random_transition(r, 3, gaussian=True)
    assert parse_diffop(to_text(T)) == T
    op = random_local_op(r, 3)
    assert parse_operator(to_text(op)) == op
    B = bd.moyal_star(4)
    assert parse_bidiff(to_text(B)) == B


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (3, 2)])
def test_ncpoly_round_trip(n, m):
    A = normal_order(weyl_quantize(n, m))
    assert parse_ncpoly(to_text(A)) == A


def test_expr_round_trip_and_numeric_operator():
    e = ne.arctan(ne.Q / ne.P) * ne.param("gamma") + ne.ln(ne.Q * ne.Q + 1)
    back = parse_expr(to_text(e))
    assert back.value(0.3, 1.2, {"gamma": 2}) == pytest.approx(e.value(0.3, 1.2, {"gamma": 2}))
    op = parse_operator("gamma*arctan(q/p)*dq + ln(p^2)*dp^2")
    assert not op.exact
    th = damped_theta()
    back = parse_operator(to_text(th))
    pts = dict(m=1.1, omega=0.9, gamma=0.02)
    for k in th.terms:
        assert back.coeff(*k).value(0.4, 1.3, pts) == pytest.approx(th.coeff(*k).value(0.4, 1.3, pts))


def test_dispatch():
    assert parse("q*p", "phasepoly") == PhasePoly.q() * PhasePoly.p()
    assert parse("2*i", "scalar") == 2 * I
    with pytest.raises(ValueError):
        parse("q", "nonsense")


@settings(max_examples=300)
@given(st.text(alphabet="qp+-*/^()01 idm", max_size=8))
def test_diagnostic_spans_are_valid(text):
    from phasestar.errors import PhaseStarError

    try:
        parse_phasepoly(text)
    except ParseError as exc:
        a, b = exc.span
        assert 0 <= a <= b <= len(text)
    except PhaseStarError:
        pass
