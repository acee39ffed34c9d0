from hypothesis import given, settings
from hypothesis import strategies as st

from phasestar import bidiff as bd
from phasestar.expsym import PlaneWave, bidiff_on_plane_waves, commutator_phase, commutes, moyal_pw, phase_series
from phasestar.scalars import HBAR, I, S

from conftest import rationals


def test_phase_and_sum():
    u, v = PlaneWave.make("phi", "xi"), PlaneWave.make("phip", "xip")
    w = moyal_pw(u, v)
    assert w.exponent == -I * (S("phi") * S("xip") - S("xi") * S("phip")) / (2 * HBAR)
    assert w.phi == S("phi") + S("phip")


@given(*(rationals() for _ in range(6)))
def test_cocycle(a, b, c, d, e, f):
    u, v, w = PlaneWave.make(a, b), PlaneWave.make(c, d), PlaneWave.make(e, f)
    assert moyal_pw(moyal_pw(u, v), w) == moyal_pw(u, moyal_pw(v, w))


@given(rationals(), rationals())
def test_parallel_waves_commute(a, t):
    u, v = PlaneWave.make(a, 2 * a), PlaneWave.make(t * a, 2 * t * a)
    assert commutes(u, v)
    assert moyal_pw(u, v) == u * v


@settings(max_examples=5)
@given(st.integers(1, 3))
def test_series_agreement(k):
    u, v = PlaneWave.make("phi", "xi"), PlaneWave.make("phip", "xip")
    assert bidiff_on_plane_waves(bd.moyal_star(2 * k), u, v, 2 * k) == phase_series(commutator_phase(u, v), k + 1)


def test_str():
    w = moyal_pw(PlaneWave.make(1, 2), PlaneWave.make(3, 4))
    assert str(w) == "exp(i/hbar)*exp(i*(4*q + 6*p)/hbar)"
