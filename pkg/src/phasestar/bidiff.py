"""Constant-coefficient bi-differential operators.

A ``BiDiffOp`` is a (possibly truncated) power series in the four commuting
symbols ``lq, lp, rq, rp`` -- left/right derivatives in q and p -- with
``ParamScalar`` coefficients.  ``f D g`` means
``sum c * (d_q^a d_p^b f) * (d_q^c d_p^d g)`` over the terms ``(a, b, c, d)``.
"""

from __future__ import annotations

from math import factorial

from .errors import BracketNotDivisibleError
from .phasepoly import PhasePoly
from .scalars import HBAR, I, ONE, ZERO, ParamScalar, S

Key = tuple[int, int, int, int]


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class BiDiffOp:
    """Truncated series in ``lq, lp, rq, rp``.

    ``order`` is the largest total derivative order retained, or ``None`` for an
    exact (finite) operator.  Equality compares the retained terms only.
    """

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
    def identity(cls, order: int | None = None) -> BiDiffOp:
        return cls._raw({(0, 0, 0, 0): ONE}, order)

    @classmethod
    def monomial(cls, a=0, b=0, c=0, d=0, coeff=1, order=None) -> BiDiffOp:
        return cls({(a, b, c, d): coeff}, order)

    def truncate(self, order: int | None) -> BiDiffOp:
        if order is None:
            return BiDiffOp._raw(dict(self.terms), self.order)
        return BiDiffOp._raw(
            {k: c for k, c in self.terms.items() if sum(k) <= order},
            _min_order(self.order, order),
        )

    def coeff(self, a, b, c, d) -> ParamScalar:
        return self.terms.get((a, b, c, d), ZERO)

    def max_order(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- algebra --------------------------------------------------------

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
        if order is not None:
            out = {k: c for k, c in out.items() if sum(k) <= order}
        return BiDiffOp._raw(out, order)

    __radd__ = __add__

    def __neg__(self):
        return BiDiffOp._raw({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> BiDiffOp:
        c = S(c)
        if not c:
            return BiDiffOp._raw({}, self.order)
        return BiDiffOp._raw({k: v * c for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, BiDiffOp):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        order = _min_order(self.order, other.order)
        out: dict = {}
        for k1, c1 in self.terms.items():
            s1 = sum(k1)
            if order is not None and s1 > order:
                continue
            for k2, c2 in other.terms.items():
                if order is not None and s1 + sum(k2) > order:
                    continue
                k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2], k1[3] + k2[3])
                v = c1 * c2
                if k in out:
                    v = out[k] + v
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return BiDiffOp._raw(out, order)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(S(other).inv())

    def __pow__(self, n: int):
        out = BiDiffOp.identity(self.order)
        for _ in range(n):
            out = out * self
        return out

    def map_coeffs(self, fn) -> BiDiffOp:
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return BiDiffOp._raw(out, self.order)

    # -- structure ------------------------------------------------------

    def transpose(self) -> BiDiffOp:
        """Swap left and right derivatives: ``f D^t g == g D f``."""
        return BiDiffOp._raw({(c, d, a, b): v for (a, b, c, d), v in self.terms.items()}, self.order)

    def conjugate(self) -> BiDiffOp:
        return self.map_coeffs(ParamScalar.conjugate)

    def adjoint(self) -> BiDiffOp:
        return self.transpose().conjugate()

    def is_hermitian(self) -> bool:
        return self.adjoint() == self

    def is_symmetric(self) -> bool:
        return self.transpose() == self

    def classical_limit(self) -> BiDiffOp:
        """Every coefficient at hbar = 0 (raises ``SingularLimitError`` on a pole)."""
        return self.map_coeffs(ParamScalar.hbar_limit)

    def substitute_param(self, name: str, value) -> BiDiffOp:
        return self.map_coeffs(lambda c: c.substitute(name, value))

    # -- action ---------------------------------------------------------

    def apply(self, f: PhasePoly, g: PhasePoly) -> PhasePoly:
        """``f D g``.  Exact when the series is complete through deg f + deg g."""
        f, g = PhasePoly.coerce(f), PhasePoly.coerce(g)
        if not f or not g:
            return PhasePoly()
        dq_f, dp_f = f.degree_q(), f.degree_p()
        dq_g, dp_g = g.degree_q(), g.degree_p()
        fcache: dict = {}
        gcache: dict = {}
        out: dict = {}
        for (a, b, c, d), coef in self.terms.items():
            if a > dq_f or b > dp_f or c > dq_g or d > dp_g:
                continue
            F = fcache.get((a, b))
            if F is None:
                F = fcache[(a, b)] = f.derivative(a, b).terms
            if not F:
                continue
            G = gcache.get((c, d))
            if G is None:
                G = gcache[(c, d)] = g.derivative(c, d).terms
            if not G:
                continue
            for (n1, m1), c1 in F.items():
                cc = coef * c1
                for (n2, m2), c2 in G.items():
                    k = (n1 + n2, m1 + m2)
                    v = cc * c2
                    if k in out:
                        v = out[k] + v
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return PhasePoly._raw(out)

    def __call__(self, f, g):
        return self.apply(f, g)

    def __repr__(self):
        return f"BiDiffOp({str(self)!r}, order={self.order})"

    def __str__(self):
        from .parsefmt import format_bidiff

        return format_bidiff(self)


def _coerce(x) -> BiDiffOp:
    if isinstance(x, BiDiffOp):
        return x
    c = S(x)
    return BiDiffOp._raw({(0, 0, 0, 0): c} if c else {}, None)


LQ = BiDiffOp.monomial(1, 0, 0, 0)
LP = BiDiffOp.monomial(0, 1, 0, 0)
RQ = BiDiffOp.monomial(0, 0, 1, 0)
RP = BiDiffOp.monomial(0, 0, 0, 1)


def exp_series(gen: BiDiffOp, order: int) -> BiDiffOp:
    """exp(gen) through total derivative order ``order``; gen must have no constant term."""
    if gen.coeff(0, 0, 0, 0):
        raise ValueError("exp_series generator must have zero constant term")
    gen = gen.truncate(order)
    out = BiDiffOp.identity(order)
    power = BiDiffOp.identity(order)
    for k in range(1, order + 1):
        power = power * gen
        if power.is_zero():
            break
        out = out + power.scale(ParamScalar(1) / factorial(k))
    return out


def poisson_op() -> BiDiffOp:
    """lq rp - lp rq."""
    return LQ * RP - LP * RQ


def moyal_star(order: int) -> BiDiffOp:
    """exp{(i hbar / 2)(lq rp - lp rq)} through total order ``order``."""
    if order < 0:
        raise ValueError("truncation order must be >= 0")
    return exp_series(poisson_op().scale(I * HBAR / 2), order)


def damped_poisson(gamma="gamma", m="m") -> BiDiffOp:
    """Poisson operator with the extra -2 gamma m lp rp term."""
    return poisson_op() - (LP * RP).scale(2 * S(gamma) * S(m))


def damped_star(gamma="gamma", m="m", order: int = 10) -> BiDiffOp:
    """Closed form exp{(i hbar/2) P_gamma} = *0 exp(-i hbar gamma m lp rp)."""
    return exp_series(damped_poisson(gamma, m).scale(I * HBAR / 2), order)


def moyal_bracket_op(star: BiDiffOp) -> BiDiffOp:
    """(star - star^t) / (i hbar); every coefficient must carry a factor of hbar."""
    diff = star - star.transpose()
    hbar_bits = HBAR.num
    (hkey,) = hbar_bits
    denom = I * HBAR
    out = {}
    for k, c in diff.terms.items():
        if not all(_has_factor(key, hkey) for key in c.num):
            raise BracketNotDivisibleError(
                f"coefficient {c} of term {k} is not divisible by hbar"
            )
        out[k] = c / denom
    return BiDiffOp._raw(out, star.order)


def _has_factor(key: int, factor_key: int) -> bool:
    from .scalars import _divides

    return _divides(factor_key, key)


def sine_bracket_series(order: int) -> BiDiffOp:
    """2 sin(hbar P / 2) / hbar summed term by term through ``order``."""
    P = poisson_op()
    out = BiDiffOp({}, order)
    k = 0
    while 2 * (2 * k + 1) <= order:
        coeff = ParamScalar((-1) ** k) / factorial(2 * k + 1) * (HBAR / 2) ** (2 * k)
        out = out + (P ** (2 * k + 1)).truncate(order).scale(coeff)
        k += 1
    return out


def mixed_associativity_check(star_a: BiDiffOp, star_b: BiDiffOp, f, g, h) -> bool:
    """``(f a g) b h == f a (g b h)``; a == b is ordinary associativity."""
    f, g, h = (PhasePoly.coerce(x) for x in (f, g, h))
    need = f.degree() + g.degree() + h.degree()
    for s in (star_a, star_b):
        if s.order is not None and s.order < need:
            raise ValueError(f"truncation order {s.order} < {need} needed for exactness")
    lhs = star_b.apply(star_a.apply(f, g), h)
    rhs = star_a.apply(f, star_b.apply(g, h))
    return lhs == rhs


def associativity_check(star: BiDiffOp, f, g, h) -> bool:
    return mixed_associativity_check(star, star, f, g, h)
