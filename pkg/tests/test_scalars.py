from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasestar.errors import ScalarDivisionError
from phasestar.scalars import HBAR, I, ParamScalar, S

from conftest import rationals

small = st.builds(lambda a, b, c: S(a) + S(b) * S("m") + S(c) * I * HBAR, rationals(), rationals(), rationals())


def test_i_squared():
    assert I * I == S(-1)


def test_rational_function_cancels():
    m = S("m")
    assert (m * m - 1) / (m - 1) == m + 1
    assert ((m + 1) / (m - 1)).is_polynomial() is False


@given(small, small, small)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(small)
def test_inverse(a):
    if a:
        assert a * a.inv() == S(1)
    else:
        with pytest.raises(ScalarDivisionError):
            a.inv()


@given(small)
def test_conjugate_involution(a):
    assert a.conjugate().conjugate() == a
    re, im = a.real_imag()
    assert re + I * im == a


def test_hbar_limit_and_order():
    c = S(3) + S(2) * HBAR + HBAR ** 2
    assert c.hbar_limit() == S(3)
    assert (HBAR ** 2 * S("m")).hbar_order() == 2


def test_substitute_and_evaluate():
    c = S("m") * S("omega") + 1
    assert c.substitute("m", Fraction(1, 2)) == S("omega") / 2 + 1
    assert c.evaluate({"m": 2, "omega": 3}) == pytest.approx(7)


def test_S_coercions():
    assert S("i") == I
    assert S(0.5) == S(Fraction(1, 2))
    assert S("m+1") == S("m") + 1
    assert isinstance(S(3), ParamScalar)
