"""Global transition operators T(d_q, d_p) and the star products they induce."""

from __future__ import annotations

from math import comb, factorial

from .bidiff import BiDiffOp, moyal_bracket_op, moyal_star, poisson_op
from .errors import NotInvertibleError
from .phasepoly import PhasePoly
from .scalars import HBAR, I, ONE, ZERO, ParamScalar, S


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class DiffOpSeries:
    """Truncated power series ``sum c_mn d_q^m d_p^n`` with ``ParamScalar`` coefficients."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order: int | None = None):
        self.order = order
        out = {}
        for k, c in (terms or {}).items():
            c = S(c)
            if c and (order is None or sum(k) <= order):
                out[tuple(k)] = c
        self.terms = out

    @classmethod
    def _raw(cls, terms, order):
        obj = object.__new__(cls)
        obj.terms = terms
        obj.order = order
        return obj

    @classmethod
    def identity(cls, order: int | None = None) -> DiffOpSeries:
        return cls._raw({(0, 0): ONE}, order)

    @classmethod
    def monomial(cls, m=0, n=0, coeff=1, order=None) -> DiffOpSeries:
        return cls({(m, n): coeff}, order)

    def coeff(self, m: int, n: int) -> ParamScalar:
        return self.terms.get((m, n), ZERO)

    def constant(self) -> ParamScalar:
        return self.coeff(0, 0)

    def truncate(self, order: int | None) -> DiffOpSeries:
        if order is None:
            return self
        return DiffOpSeries._raw(
            {k: c for k, c in self.terms.items() if sum(k) <= order}, _min_order(self.order, order)
        )

    def __eq__(self, other):
        if not isinstance(other, DiffOpSeries):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        order = _min_order(self.order, other.order)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return DiffOpSeries(out, order) if order is not None else DiffOpSeries._raw(out, None)

    __radd__ = __add__

    def __neg__(self):
        return DiffOpSeries._raw({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> DiffOpSeries:
        c = S(c)
        if not c:
            return DiffOpSeries._raw({}, self.order)
        return DiffOpSeries._raw({k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, DiffOpSeries):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        order = _min_order(self.order, other.order)
        out: dict = {}
        for (m1, n1), c1 in self.terms.items():
            for (m2, n2), c2 in other.terms.items():
                if order is not None and m1 + n1 + m2 + n2 > order:
                    continue
                k = (m1 + m2, n1 + n2)
                v = c1 * c2
                if k in out:
                    v = out[k] + v
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return DiffOpSeries._raw(out, order)

    def __rmul__(self, other):
        return self.scale(other)

    def map_coeffs(self, fn) -> DiffOpSeries:
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return DiffOpSeries._raw(out, self.order)

    def conjugate(self) -> DiffOpSeries:
        return self.map_coeffs(ParamScalar.conjugate)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def substitute_param(self, name: str, value) -> DiffOpSeries:
        return self.map_coeffs(lambda c: c.substitute(name, value))

    def apply(self, f: PhasePoly) -> PhasePoly:
        """T f; exact on polynomials of degree <= order."""
        f = PhasePoly.coerce(f)
        out = PhasePoly()
        for (m, n), c in self.terms.items():
            df = f.derivative(m, n)
            if df:
                out = out + df.scale(c)
        return out

    def __call__(self, f):
        return self.apply(f)

    def __repr__(self):
        return f"DiffOpSeries({str(self)!r}, order={self.order})"

    def __str__(self):
        from .parsefmt import format_diffop

        return format_diffop(self)


def _coerce(x) -> DiffOpSeries:
    if isinstance(x, DiffOpSeries):
        return x
    c = S(x)
    return DiffOpSeries._raw({(0, 0): c} if c else {}, None)


DQ = DiffOpSeries.monomial(1, 0)
DP = DiffOpSeries.monomial(0, 1)


# ---------------------------------------------------------------------------
# series constructors


def _series(gen: DiffOpSeries, coeffs, order: int) -> DiffOpSeries:
    """sum_k coeffs(k) gen^k through ``order``; gen has no constant term."""
    gen = gen.truncate(order)
    out = DiffOpSeries._raw({}, order)
    power = DiffOpSeries.identity(order)
    for k in range(order + 1):
        c = coeffs(k)
        if c:
            out = out + power.scale(c)
        power = power * gen
        if not power.terms:
            break
    return out


def exp_series(gen: DiffOpSeries, order: int) -> DiffOpSeries:
    return _series(gen, lambda k: ParamScalar(1) / factorial(k), order)


def sinc_series(gen: DiffOpSeries, order: int) -> DiffOpSeries:
    """sin(x)/x = sum (-1)^j x^(2j) / (2j+1)!."""
    return _series(
        gen, lambda k: ParamScalar((-1) ** (k // 2)) / factorial(k + 1) if k % 2 == 0 else ZERO, order
    )


def born_jordan(order: int = 10) -> DiffOpSeries:
    """sinc(hbar d_p d_q / 2)."""
    return sinc_series((DQ * DP).scale(HBAR / 2), order)


def standard(order: int = 10) -> DiffOpSeries:
    """exp(i hbar d_p d_q / 2)."""
    return exp_series((DQ * DP).scale(I * HBAR / 2), order)


def husimi(eta="eta", sigma="sigma", order: int = 10) -> DiffOpSeries:
    """exp{(eta/4)(sigma^2 d_q^2 + d_p^2 / sigma^2)}."""
    eta, sigma = S(eta), S(sigma)
    gen = DiffOpSeries({(2, 0): eta * sigma * sigma / 4, (0, 2): eta / (4 * sigma * sigma)})
    return exp_series(gen, order)


def damped(gamma="gamma", m="m", order: int = 10) -> DiffOpSeries:
    """exp{-(i hbar gamma m / 2) d_p^2}."""
    return exp_series(DiffOpSeries({(0, 2): -I * HBAR * S(gamma) * S(m) / 2}), order)


def damped_eta(gamma="gamma", eta="eta", m="m", order: int = 10) -> DiffOpSeries:
    """exp{-eta gamma m d_p^2}."""
    return exp_series(DiffOpSeries({(0, 2): -S(eta) * S(gamma) * S(m)}), order)


CONSTRUCTORS = {
    "born-jordan": born_jordan,
    "standard": standard,
    "husimi": husimi,
    "damped": damped,
    "damped-eta": damped_eta,
}


# ---------------------------------------------------------------------------
# inversion and induced products


def invert(T: DiffOpSeries, order: int | None = None) -> DiffOpSeries:
    """T^{-1} through ``order`` (default: T's own order)."""
    order = T.order if order is None else order
    if order is None:
        raise ValueError("inverse of an exact operator needs an explicit truncation order")
    c0 = T.constant()
    if not c0:
        raise NotInvertibleError()
    inv0 = c0.inv()
    U = (T.scale(inv0) - 1).truncate(order)
    out = DiffOpSeries.identity(order)
    power = DiffOpSeries.identity(order)
    for _ in range(order):
        power = (power * U).scale(-1)
        if not power.terms:
            break
        out = out + power
    return out.scale(inv0)


def lift_left(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    return BiDiffOp({(m, n, 0, 0): c for (m, n), c in T.terms.items()}, _min_order(T.order, order))


def lift_right(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    return BiDiffOp({(0, 0, m, n): c for (m, n), c in T.terms.items()}, _min_order(T.order, order))


def lift_sum(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    """T(lq + rq, lp + rp) by binomial expansion."""
    order = _min_order(T.order, order)
    out: dict = {}
    for (m, n), c in T.terms.items():
        if order is not None and m + n > order:
            continue
        for j in range(m + 1):
            for k in range(n + 1):
                key = (j, k, m - j, n - k)
                v = c * (comb(m, j) * comb(n, k))
                if key in out:
                    v = out[key] + v
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return BiDiffOp._raw(out, order)


def odot(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    """T^{-1}(left) T(left + right) T^{-1}(right), truncated at ``order``."""
    order = T.order if order is None else order
    Tinv = invert(T, order)
    return (lift_left(Tinv, order) * lift_sum(T, order) * lift_right(Tinv, order)).truncate(order)


def star_T(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    order = T.order if order is None else order
    return moyal_star(order) * odot(T, order)


def hbar_zero_part(T: DiffOpSeries) -> DiffOpSeries:
    """T_0: every coefficient at hbar = 0."""
    return T.map_coeffs(ParamScalar.hbar_limit)


def classical_bracket_limit(T: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    """lim_{hbar -> 0} of the Moyal bracket operator of star_T."""
    return moyal_bracket_op(star_T(T, order)).classical_limit()


def verify_classical_limit_theorem(T: DiffOpSeries, order: int | None = None) -> bool:
    """lim M_T == P * odot(T_0) through ``order``."""
    order = T.order if order is None else order
    lhs = classical_bracket_limit(T, order)
    rhs = (poisson_op() * odot(hbar_zero_part(T), order)).truncate(order)
    return lhs == rhs


def first_order_delta(theta0: DiffOpSeries, order: int | None = None) -> BiDiffOp:
    """-theta0(left) + theta0(left + right) - theta0(right)."""
    if theta0.constant():
        raise ValueError("first_order_delta needs a series with zero constant term")
    return lift_sum(theta0, order) - lift_left(theta0, order) - lift_right(theta0, order)
