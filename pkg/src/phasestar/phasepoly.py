"""Polynomials in the phase-space coordinates q, p over ``ParamScalar``."""

from __future__ import annotations

from .errors import DegreeBoundError
from .scalars import ONE, ZERO, ParamScalar, S

DEFAULT_DEGREE_BOUND = 64


def falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    out = 1
    for j in range(n - k + 1, n + 1):
        out *= j
    return out


class PhasePoly:
    """Sparse map ``(deg_q, deg_p) -> ParamScalar`` with no stored zeros."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        elif isinstance(terms, dict):
            self.terms = {k: S(v) for k, v in terms.items() if v}
        else:
            # scalar constant
            c = S(terms)
            self.terms = {(0, 0): c} if c else {}

    @classmethod
    def _raw(cls, terms: dict) -> PhasePoly:
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def q(cls) -> PhasePoly:
        return cls._raw({(1, 0): ONE})

    @classmethod
    def p(cls) -> PhasePoly:
        return cls._raw({(0, 1): ONE})

    @classmethod
    def monomial(cls, n: int, m: int, coeff=1) -> PhasePoly:
        c = S(coeff)
        return cls._raw({(n, m): c} if c else {})

    @classmethod
    def coerce(cls, x) -> PhasePoly:
        return x if isinstance(x, PhasePoly) else cls(x)

    # -- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((n + m for n, m in self.terms), default=0)

    def degree_q(self) -> int:
        return max((n for n, _ in self.terms), default=0)

    def degree_p(self) -> int:
        return max((m for _, m in self.terms), default=0)

    def coeff(self, n: int, m: int) -> ParamScalar:
        return self.terms.get((n, m), ZERO)

    def constant(self) -> ParamScalar:
        return self.coeff(0, 0)

    def __eq__(self, other):
        if isinstance(other, PhasePoly):
            return self.terms == other.terms
        try:
            return self.terms == PhasePoly(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        other = PhasePoly.coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PhasePoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-PhasePoly.coerce(other))

    def __rsub__(self, other):
        return PhasePoly.coerce(other) - self

    def scale(self, c) -> PhasePoly:
        c = S(c)
        if not c:
            return PhasePoly()
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if w:
                out[k] = w
        return PhasePoly._raw(out)

    def mul(self, other: PhasePoly, max_degree: int = DEFAULT_DEGREE_BOUND) -> PhasePoly:
        if self.degree() + other.degree() > max_degree and self and other:
            raise DegreeBoundError(
                f"product degree {self.degree() + other.degree()} exceeds bound {max_degree}"
            )
        out: dict = {}
        for (n1, m1), c1 in self.terms.items():
            for (n2, m2), c2 in other.terms.items():
                k = (n1 + n2, m1 + m2)
                v = c1 * c2
                if k in out:
                    v = out[k] + v
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return PhasePoly._raw(out)

    def __mul__(self, other):
        if isinstance(other, PhasePoly):
            return self.mul(other)
        try:
            return self.scale(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        return self.scale(S(other).inv())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("PhasePoly powers must be nonnegative integers")
        out = PhasePoly(1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -------------------------------------------------------

    def derivative(self, a: int = 0, b: int = 0) -> PhasePoly:
        """``d^a/dq^a d^b/dp^b``."""
        if a == 0 and b == 0:
            return self
        out = {}
        for (n, m), c in self.terms.items():
            if n >= a and m >= b:
                out[(n - a, m - b)] = c * (falling(n, a) * falling(m, b))
        return PhasePoly._raw(out)

    def partial_q(self) -> PhasePoly:
        return self.derivative(1, 0)

    def partial_p(self) -> PhasePoly:
        return self.derivative(0, 1)

    # -- coefficient maps ---------------------------------------------

    def map_coeffs(self, fn) -> PhasePoly:
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return PhasePoly._raw(out)

    def conjugate(self) -> PhasePoly:
        return self.map_coeffs(ParamScalar.conjugate)

    def hbar_limit(self) -> PhasePoly:
        return self.map_coeffs(ParamScalar.hbar_limit)

    def substitute_param(self, name: str, value) -> PhasePoly:
        return self.map_coeffs(lambda c: c.substitute(name, value))

    def substitute(self, q=None, p=None) -> PhasePoly:
        """Compose with ``q -> q_expr``, ``p -> p_expr`` (PhasePolys or scalars)."""
        qx = PhasePoly.q() if q is None else PhasePoly.coerce(q)
        px = PhasePoly.p() if p is None else PhasePoly.coerce(p)
        out = PhasePoly()
        qpow = [PhasePoly(1)]
        ppow = [PhasePoly(1)]
        for (n, m), c in self.terms.items():
            while len(qpow) <= n:
                qpow.append(qpow[-1] * qx)
            while len(ppow) <= m:
                ppow.append(ppow[-1] * px)
            out = out + (qpow[n] * ppow[m]).scale(c)
        return out

    def evaluate(self, q, p, bindings: dict | None = None) -> complex:
        total = 0j
        for (n, m), c in self.terms.items():
            total += c.evaluate(bindings) * (q ** n) * (p ** m)
        return total

    def __repr__(self):
        return f"PhasePoly({str(self)!r})"

    def __str__(self):
        from .parsefmt import format_phasepoly

        return format_phasepoly(self)


Q = PhasePoly.q()
P = PhasePoly.p()


def poisson_bracket(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """``{f, g} = df/dq dg/dp - df/dp dg/dq``."""
    return f.partial_q() * g.partial_p() - f.partial_p() * g.partial_q()


def sho_hamiltonian(m="m", omega="omega") -> PhasePoly:
    m, omega = S(m), S(omega)
    return PhasePoly({(0, 2): 1 / (2 * m), (2, 0): m * omega * omega / 2})
