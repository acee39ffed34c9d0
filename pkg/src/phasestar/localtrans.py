"""Local transition operators T(q, p, dq, dp): midpoint pair lifts, the local
product on concrete pairs, and first-order augmentation terms."""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import comb

from . import numeval as ne
from .bidiff import moyal_star
from .errors import InversionTruncationWarning, PhaseStarError
from .phasepoly import PhasePoly
from .scalars import ParamScalar, S


class LocalDiffOp:
    """``sum c_mn(q, p) dq^m dp^n`` with every derivative to the right of its coefficient.

    Coefficients are ``PhasePoly`` (exact flavour) or ``numeval.Expr`` (numeric
    flavour).  Mixed input is promoted to the numeric flavour.
    """

    __slots__ = ("terms", "exact")

    def __init__(self, terms=None):
        if isinstance(terms, dict):
            items = [(c, m, n) for (m, n), c in terms.items()]
        else:
            items = list(terms or [])
        exact = all(isinstance(c, (PhasePoly, ParamScalar, int, Fraction)) for c, _, _ in items)
        conv = PhasePoly.coerce if exact else ne.as_expr
        out: dict = {}
        for c, m, n in items:
            if m < 0 or n < 0:
                raise ValueError("derivative orders must be nonnegative")
            c = conv(c)
            out[(m, n)] = out[(m, n)] + c if (m, n) in out else c
        zero = PhasePoly() if exact else ne.const(0)
        self.terms = {k: v for k, v in out.items() if v != zero}
        self.exact = exact

    @classmethod
    def identity(cls) -> LocalDiffOp:
        return cls([(PhasePoly(1), 0, 0)])

    @classmethod
    def from_series(cls, T) -> LocalDiffOp:
        """Promote a constant-coefficient ``DiffOpSeries``."""
        return cls([(PhasePoly(c), m, n) for (m, n), c in T.terms.items()])

    def coeff(self, m: int, n: int):
        if (m, n) in self.terms:
            return self.terms[(m, n)]
        return PhasePoly() if self.exact else ne.const(0)

    def max_order(self) -> int:
        return max((m + n for m, n in self.terms), default=0)

    def is_global(self) -> bool:
        return self.exact and all(set(c.terms) <= {(0, 0)} for c in self.terms.values())

    def to_numeric(self) -> LocalDiffOp:
        return LocalDiffOp([(ne.as_expr(c), m, n) for (m, n), c in self.terms.items()])

    def __eq__(self, other):
        if not isinstance(other, LocalDiffOp):
            return NotImplemented
        return self.exact == other.exact and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        return LocalDiffOp([(c, m, n) for (m, n), c in self.terms.items()]
                           + [(c, m, n) for (m, n), c in other.terms.items()])

    __radd__ = __add__

    def __neg__(self):
        return LocalDiffOp([(-c, m, n) for (m, n), c in self.terms.items()])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> LocalDiffOp:
        return LocalDiffOp([(v * c, m, n) for (m, n), v in self.terms.items()])

    def compose(self, other: LocalDiffOp) -> LocalDiffOp:
        """self o other, rewritten to normal form with the Leibniz rule."""
        other = _coerce(other)
        out = []
        for (m1, n1), a in self.terms.items():
            for (m2, n2), b in other.terms.items():
                for i in range(m1 + 1):
                    for j in range(n1 + 1):
                        db = b.derivative(i, j)
                        if not _nonzero(db):
                            continue
                        c = a * db
                        k = comb(m1, i) * comb(n1, j)
                        if k != 1:
                            c = c * k
                        out.append((c, m1 - i + m2, n1 - j + n2))
        return LocalDiffOp(out)

    def __mul__(self, other):
        if isinstance(other, LocalDiffOp):
            return self.compose(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def apply(self, f):
        """T f for a PhasePoly (exact flavour) or an Expr (either flavour)."""
        if isinstance(f, ne.Expr) or not self.exact:
            f = ne.as_expr(f)
            out = ne.const(0)
            for (m, n), c in self.terms.items():
                out = out + ne.as_expr(c) * f.derivative(m, n)
            return out
        f = PhasePoly.coerce(f)
        out = PhasePoly()
        for (m, n), c in self.terms.items():
            d = f.derivative(m, n)
            if d:
                out = out + c * d
        return out

    def __call__(self, f):
        return self.apply(f)

    def substitute_param(self, bindings: dict) -> LocalDiffOp:
        if self.exact:
            out = []
            for (m, n), c in self.terms.items():
                for name, v in bindings.items():
                    c = c.substitute_param(name, v)
                out.append((c, m, n))
            return LocalDiffOp(out)
        return LocalDiffOp([(c.substitute(bindings), m, n) for (m, n), c in self.terms.items()])

    def __repr__(self):
        return f"LocalDiffOp({str(self)!r})"

    def __str__(self):
        from .parsefmt import format_localop

        return format_localop(self)


def _nonzero(x) -> bool:
    if isinstance(x, ne.Expr):
        return not (x.kind == "const" and x.args[0] == 0)
    return bool(x)


def _coerce(x) -> LocalDiffOp:
    if isinstance(x, LocalDiffOp):
        return x
    if isinstance(x, ne.Expr):
        return LocalDiffOp([(x, 0, 0)])
    return LocalDiffOp([(PhasePoly.coerce(x), 0, 0)])


# ---------------------------------------------------------------------------
# two-point functions


class PairPoly:
    """Polynomial in (q1, p1, q2, p2): map (n1, m1, n2, m2) -> ParamScalar."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: S(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def _raw(cls, terms):
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def product(cls, f: PhasePoly, g: PhasePoly) -> PairPoly:
        """f(1) g(2)."""
        out = {}
        for (n1, m1), c1 in f.terms.items():
            for (n2, m2), c2 in g.terms.items():
                out[(n1, m1, n2, m2)] = c1 * c2
        return cls._raw({k: v for k, v in out.items() if v})

    def __add__(self, other: PairPoly) -> PairPoly:
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PairPoly._raw(out)

    def __mul__(self, other: PairPoly) -> PairPoly:
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                v = c1 * c2
                if k in out:
                    v = out[k] + v
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return PairPoly._raw(out)

    def __eq__(self, other):
        return isinstance(other, PairPoly) and self.terms == other.terms

    def derivative(self, d: tuple) -> PairPoly:
        """d = (a1, b1, a2, b2) derivative orders in q1, p1, q2, p2."""
        from .phasepoly import falling

        out = {}
        for k, c in self.terms.items():
            if all(e >= o for e, o in zip(k, d)):
                f = 1
                for e, o in zip(k, d):
                    f *= falling(e, o)
                out[tuple(e - o for e, o in zip(k, d))] = c * f
        return PairPoly._raw(out)

    def identify(self) -> PhasePoly:
        """I(1, 2): set q1 = q2 = q, p1 = p2 = p."""
        out: dict = {}
        for (n1, m1, n2, m2), c in self.terms.items():
            k = (n1 + n2, m1 + m2)
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PhasePoly._raw(out)


def _lift_coeff(c: PhasePoly, alpha: Fraction, beta: Fraction) -> PairPoly:
    """c(alpha q1 + (1 - alpha) q2, beta p1 + (1 - beta) p2)."""
    out: dict = {}
    for (n, m), v in c.terms.items():
        for i in range(n + 1):
            wq = comb(n, i) * alpha ** i * (1 - alpha) ** (n - i)
            if not wq:
                continue
            for j in range(m + 1):
                wp = comb(m, j) * beta ** j * (1 - beta) ** (m - j)
                if not wp:
                    continue
                k = (i, j, n - i, m - j)
                t = v * (wq * wp)
                t = out[k] + t if k in out else t
                if t:
                    out[k] = t
                else:
                    out.pop(k, None)
    return PairPoly._raw(out)


class PairOperator:
    """``sum C_mn(1, 2) (dq1 + dq2)^m (dp1 + dp2)^n`` with lifted coefficients."""

    def __init__(self, terms: dict):
        self.terms = terms  # (m, n) -> PairPoly

    def apply(self, F: PairPoly) -> PairPoly:
        out = PairPoly()
        for (m, n), C in self.terms.items():
            acc = PairPoly()
            for i in range(m + 1):
                for j in range(n + 1):
                    d = F.derivative((i, j, m - i, n - j))
                    if d.terms:
                        acc = acc + PairPoly._raw({k: v * (comb(m, i) * comb(n, j)) for k, v in d.terms.items()})
            if acc.terms:
                out = out + C * acc
        return out

    def __call__(self, F):
        return self.apply(F)

    def __eq__(self, other):
        return isinstance(other, PairOperator) and {
            k: v.terms for k, v in self.terms.items()
        } == {k: v.terms for k, v in other.terms.items()}


def midpoint_lift(T: LocalDiffOp, alpha=Fraction(1, 2), beta=Fraction(1, 2)) -> PairOperator:
    """Coefficients moved to the weighted midpoint, derivatives replaced by sums."""
    if not T.exact:
        raise PhaseStarError("midpoint lift requires exact coefficients")
    alpha, beta = Fraction(alpha), Fraction(beta)
    return PairOperator({k: _lift_coeff(c, alpha, beta) for k, c in T.terms.items()})


def midpoint_identity_check(m: int, a1: int, a2: int) -> bool:
    """I(1,2) (dq1 + dq2)^m q1^a1 q2^a2 == dq^m q^(a1 + a2)."""
    if min(m, a1, a2) < 0:
        raise ValueError("arguments must be nonnegative")
    F = PairPoly({(a1, 0, a2, 0): 1})
    acc = PairPoly()
    for i in range(m + 1):
        d = F.derivative((i, 0, m - i, 0))
        acc = acc + PairPoly._raw({k: v * comb(m, i) for k, v in d.terms.items()})
    return acc.identify() == PhasePoly.monomial(a1 + a2, 0).derivative(m, 0)


def midpoint_product_check(T: LocalDiffOp, f: PhasePoly, g: PhasePoly, alpha=Fraction(1, 2), beta=Fraction(1, 2)) -> bool:
    """I(1,2) T(1,2) f(1) g(2) == T(f g)."""
    lhs = midpoint_lift(T, alpha, beta).apply(PairPoly.product(f, g)).identify()
    return lhs == T.apply(f * g)


# ---------------------------------------------------------------------------
# local product on concrete pairs


def _split_identity(T: LocalDiffOp) -> LocalDiffOp:
    """theta = T - 1, checking that theta raises derivative order."""
    if not T.exact:
        raise PhaseStarError("local star products need exact coefficients")
    if T.coeff(0, 0) != PhasePoly(1):
        raise PhaseStarError("local transition operator must have the form 1 + theta")
    return LocalDiffOp([(c, m, n) for (m, n), c in T.terms.items() if (m, n) != (0, 0)])


def apply_inverse(T: LocalDiffOp, f: PhasePoly, K: int = 4) -> tuple[PhasePoly, bool]:
    """sum_{k <= K} (-theta)^k f and whether theta^(K+1) f vanished."""
    theta = _split_identity(T)
    f = PhasePoly.coerce(f)
    out = f
    term = f
    for _ in range(K):
        term = -theta.apply(term)
        if not term:
            return out, True
        out = out + term
    return out, not theta.apply(term)


def local_star_apply(T: LocalDiffOp, f, g, K: int = 4) -> PhasePoly:
    """I(1,2) T(1,2) *0(1,2) [T^-1 f](1) [T^-1 g](2), T^-1 truncated at K.

    Emits ``InversionTruncationWarning`` when theta^(K+1) does not annihilate
    an input, in which case the result is only a truncation.
    """
    f, g = PhasePoly.coerce(f), PhasePoly.coerce(g)
    u, ok_u = apply_inverse(T, f, K)
    v, ok_v = apply_inverse(T, g, K)
    if not (ok_u and ok_v):
        warnings.warn("inversion truncation not exact", InversionTruncationWarning, stacklevel=2)
    star = moyal_star(u.degree() + v.degree())
    F = PairPoly()
    for (a, b, c, d), coef in star.terms.items():
        du, dv = u.derivative(a, b), v.derivative(c, d)
        if du and dv:
            F = F + PairPoly._raw({k: x * coef for k, x in PairPoly.product(du, dv).terms.items()})
    return midpoint_lift(T).apply(F).identify()


# ---------------------------------------------------------------------------
# augmentation


def _coordinate(x: str, exact: bool):
    if x == "q":
        return PhasePoly.q() if exact else ne.Q
    if x == "p":
        return PhasePoly.p() if exact else ne.P
    raise ValueError("coordinate must be 'q' or 'p'")


def _bracket(f, g):
    return f.partial_q() * g.partial_p() - f.partial_p() * g.partial_q()


def augmentation(theta: LocalDiffOp, H, x: str):
    """A_theta(x) = theta({x, H}) - {theta(x), H} - {x, theta(H)}."""
    exact = theta.exact and not isinstance(H, ne.Expr)
    if not exact:
        theta = theta if not theta.exact else theta.to_numeric()
        H = ne.as_expr(H)
    X = _coordinate(x, exact)
    return theta.apply(_bracket(X, H)) - _bracket(theta.apply(X), H) - _bracket(X, theta.apply(H))


def ansatz_augmentation(theta: LocalDiffOp, H, x: str):
    """Explicit sums for theta = sum theta_mn dq^m dp^n (m + n >= 1):

    A(q) = -{theta_10, H} - sum (dp theta_mn)(dq^m dp^n H)
    A(p) = -{theta_01, H} + sum (dq theta_mn)(dq^m dp^n H)
    """
    if (0, 0) in theta.terms:
        raise ValueError("the ansatz has no zeroth-order term")
    exact = theta.exact and not isinstance(H, ne.Expr)
    if not exact:
        theta = theta if not theta.exact else theta.to_numeric()
        H = ne.as_expr(H)
    if x == "q":
        out = -_bracket(theta.coeff(1, 0), H)
        for (m, n), c in theta.terms.items():
            out = out - c.partial_p() * H.derivative(m, n)
        return out
    if x == "p":
        out = -_bracket(theta.coeff(0, 1), H)
        for (m, n), c in theta.terms.items():
            out = out + c.partial_q() * H.derivative(m, n)
        return out
    raise ValueError("coordinate must be 'q' or 'p'")


def augmentation_at(theta: LocalDiffOp, H, x: str, q0: float, p0: float, params: dict | None = None, k: int = 3) -> float:
    """A_theta(x) at one point, computed entirely in jet arithmetic."""
    theta = theta if not theta.exact else theta.to_numeric()
    Hj = ne.eval_jet(ne.as_expr(H), q0, p0, k, params)
    X = ne.eval_jet(ne.Q if x == "q" else ne.P, q0, p0, k, params)
    coeffs = {mn: ne.eval_jet(c, q0, p0, k, params) for mn, c in theta.terms.items()}

    def th(f):
        parts = []
        for (m, n), c in coeffs.items():
            if m + n > f.order:
                raise ValueError("jet order too small for this operator")
            d = f.derivative(m, n)
            parts.append(c.truncate(d.order) * d)
        low = min(t.order for t in parts)
        out = parts[0].truncate(low)
        for t in parts[1:]:
            out = out + t.truncate(low)
        return out

    def br(f, g):
        f, g = ne._align(f, g)
        return ne.jet_poisson(f, g)

    total = th(br(X, Hj)).value - br(th(X), Hj).value - br(X, th(Hj)).value
    return float(total)


def damped_theta(m="m", omega="omega", gamma="gamma") -> LocalDiffOp:
    """theta_01 dp + theta_02 dp^2 for linear damping of the oscillator.

    theta_01 = (2 gamma/omega) [p arctan(m omega q/p) + (m omega q/2) ln(p^2 + m^2 omega^2 q^2)]
    theta_02 = -(gamma/omega) [2 m H arctan(m omega q/p) + m omega q p]
    """
    m, omega, gamma = (ne.as_expr(v) for v in (m, omega, gamma))
    q, p = ne.Q, ne.P
    mw = m * omega
    at = ne.arctan(mw * q / p)
    H = p ** 2 / (ne.const(2) * m) + m * omega ** 2 * q ** 2 / ne.const(2)
    t01 = ne.const(2) * gamma / omega * (p * at + mw * q / ne.const(2) * ne.ln(p ** 2 + mw ** 2 * q ** 2))
    t02 = -(gamma / omega) * (ne.const(2) * m * H * at + mw * q * p)
    return LocalDiffOp([(t01, 0, 1), (t02, 0, 2)])


def damped_theta_01_derivative(m="m", omega="omega", gamma="gamma") -> ne.Expr:
    """(2 gamma/omega) arctan(m omega q/p), the intended p-derivative of theta_01."""
    m, omega, gamma = (ne.as_expr(v) for v in (m, omega, gamma))
    return ne.const(2) * gamma / omega * ne.arctan(m * omega * ne.Q / ne.P)


def sho_expr(m="m", omega="omega") -> ne.Expr:
    m, omega = ne.as_expr(m), ne.as_expr(omega)
    return ne.P ** 2 / (ne.const(2) * m) + m * omega ** 2 * ne.Q ** 2 / ne.const(2)
