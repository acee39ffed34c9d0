"""Real expression trees with arctan/ln, truncated Taylor jets, and sampled identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import EmptySampleError, SingularPointError
from .phasepoly import PhasePoly

DEFAULT_SEED = 20240611
P_FLOOR = 0.1


class Expr:
    """Immutable expression node; build with the module helpers and operators."""

    __slots__ = ("kind", "args", "_hash")

    def __init__(self, kind: str, *args):
        self.kind = kind
        self.args = args
        self._hash = hash((kind, args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self.kind == other.kind and self.args == other.args

    # -- arithmetic with light folding ----------------------------------

    def __add__(self, other):
        other = as_expr(other)
        if _is_const(self) and _is_const(other):
            return const(self.args[0] + other.args[0])
        if _is_const(self, 0):
            return other
        if _is_const(other, 0):
            return self
        return Expr("add", self, other)

    def __radd__(self, other):
        return as_expr(other) + self

    def __sub__(self, other):
        other = as_expr(other)
        if _is_const(self) and _is_const(other):
            return const(self.args[0] - other.args[0])
        if _is_const(other, 0):
            return self
        if self == other:
            return const(0)
        return Expr("sub", self, other)

    def __rsub__(self, other):
        return as_expr(other) - self

    def __neg__(self):
        if _is_const(self):
            return const(-self.args[0])
        return const(-1) * self

    def __mul__(self, other):
        other = as_expr(other)
        if _is_const(self) and _is_const(other):
            return const(self.args[0] * other.args[0])
        if _is_const(self, 0) or _is_const(other, 0):
            return const(0)
        if _is_const(self, 1):
            return other
        if _is_const(other, 1):
            return self
        return Expr("mul", self, other)

    def __rmul__(self, other):
        return as_expr(other) * self

    def __truediv__(self, other):
        other = as_expr(other)
        if _is_const(other, 0):
            raise ZeroDivisionError("division by the zero expression")
        if _is_const(self) and _is_const(other):
            return const(self.args[0] / other.args[0])
        if _is_const(self, 0):
            return const(0)
        if _is_const(other, 1):
            return self
        return Expr("div", self, other)

    def __rtruediv__(self, other):
        return as_expr(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return const(1)
        if n == 1:
            return self
        if _is_const(self):
            if self.args[0] == 0 and n < 0:
                raise ZeroDivisionError("negative power of zero")
            return const(self.args[0] ** n)
        return Expr("pow", self, n)

    # -- calculus -------------------------------------------------------

    def diff(self, var: str) -> Expr:
        return _diff(self, var)

    def partial_q(self) -> Expr:
        return _diff(self, "q")

    def partial_p(self) -> Expr:
        return _diff(self, "p")

    def derivative(self, a: int = 0, b: int = 0) -> Expr:
        out = self
        for _ in range(a):
            out = _diff(out, "q")
        for _ in range(b):
            out = _diff(out, "p")
        return out

    def scale(self, c) -> Expr:
        return self * as_expr(c)

    # -- evaluation -----------------------------------------------------

    def free_parameters(self) -> set[str]:
        if self.kind == "param":
            return {self.args[0]}
        out = set()
        for a in self.args:
            if isinstance(a, Expr):
                out |= a.free_parameters()
        return out

    def substitute(self, bindings: dict) -> Expr:
        """Replace parameters by numbers or expressions, refolding constants."""
        return _subst(self, {k: as_expr(v) for k, v in bindings.items()}, {})

    def evaluate(self, q, p, params: dict | None = None):
        """Vectorized evaluation; returns (values, singular_mask)."""
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        shape = np.broadcast(q, p).shape
        bad = np.zeros(shape, dtype=bool)
        with np.errstate(all="ignore"):
            val = _evaluate(self, q, p, params or {}, bad, {})
        val = np.broadcast_to(np.asarray(val, dtype=float), shape)
        bad |= ~np.isfinite(val)
        return val, bad

    def value(self, q: float, p: float, params: dict | None = None) -> float:
        v, bad = self.evaluate(q, p, params)
        if bool(np.any(bad)):
            raise SingularPointError(f"singular sample point (q={q}, p={p})")
        return float(v)

    def __call__(self, q, p, params=None):
        return self.value(q, p, params)

    def __repr__(self):
        return f"Expr({str(self)!r})"

    def __str__(self):
        from .parsefmt import format_expr

        return format_expr(self)


def _is_const(e: Expr, value=None) -> bool:
    return e.kind == "const" and (value is None or e.args[0] == value)


def const(value) -> Expr:
    if isinstance(value, float):
        value = Fraction(str(value))
    return Expr("const", Fraction(value))


def param(name: str) -> Expr:
    return Expr("param", name)


Q = Expr("q")
P = Expr("p")


def arctan(e) -> Expr:
    e = as_expr(e)
    if _is_const(e, 0):
        return const(0)
    return Expr("arctan", e)


def ln(e) -> Expr:
    e = as_expr(e)
    if _is_const(e, 1):
        return const(0)
    return Expr("ln", e)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, PhasePoly):
        return from_phasepoly(x)
    if isinstance(x, str):
        if x.isidentifier():
            return param(x)
        from .parsefmt import parse_expr

        return parse_expr(x)
    if isinstance(x, (int, Fraction, float)):
        return const(x)
    from .scalars import ParamScalar

    if isinstance(x, ParamScalar):
        return from_scalar(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def from_scalar(c) -> Expr:
    """Real ParamScalar to Expr (raises on imaginary parts)."""
    if not c.is_real():
        raise ValueError(f"scalar {c} is not real; expressions are real-valued")

    def poly(which):
        out = const(0)
        for coeff, _imag, powers in c.terms(which):
            t = const(coeff)
            for name in sorted(powers):
                t = t * param(name) ** powers[name]
            out = out + t
        return out

    return poly("num") / poly("den")


def from_phasepoly(f: PhasePoly) -> Expr:
    out = const(0)
    for (n, m), c in sorted(f.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
        out = out + from_scalar(c) * Q ** n * P ** m
    return out


def _diff(e: Expr, var: str, _cache: dict = {}) -> Expr:
    key = (e, var)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    k = e.kind
    if k in ("const", "param"):
        out = const(0)
    elif k in ("q", "p"):
        out = const(1 if k == var else 0)
    elif k == "add":
        out = _diff(e.args[0], var) + _diff(e.args[1], var)
    elif k == "sub":
        out = _diff(e.args[0], var) - _diff(e.args[1], var)
    elif k == "mul":
        a, b = e.args
        out = _diff(a, var) * b + a * _diff(b, var)
    elif k == "div":
        a, b = e.args
        da, db = _diff(a, var), _diff(b, var)
        if _is_const(db, 0):
            out = da / b
        else:
            out = (da * b - a * db) / b ** 2
    elif k == "pow":
        a, n = e.args
        out = const(n) * a ** (n - 1) * _diff(a, var)
    elif k == "arctan":
        a = e.args[0]
        out = _diff(a, var) / (const(1) + a ** 2)
    elif k == "ln":
        a = e.args[0]
        out = _diff(a, var) / a
    else:
        raise ValueError(f"unknown node {k}")
    if len(_cache) > 200_000:
        _cache.clear()
    _cache[key] = out
    return out


def _subst(e: Expr, b: dict, memo: dict) -> Expr:
    if e in memo:
        return memo[e]
    k = e.kind
    if k == "param":
        out = b.get(e.args[0], e)
    elif k in ("const", "q", "p"):
        out = e
    elif k == "pow":
        out = _subst(e.args[0], b, memo) ** e.args[1]
    elif k == "arctan":
        out = arctan(_subst(e.args[0], b, memo))
    elif k == "ln":
        out = ln(_subst(e.args[0], b, memo))
    else:
        x, y = (_subst(a, b, memo) for a in e.args)
        out = {"add": x + y, "sub": x - y, "mul": x * y}.get(k) if k != "div" else x / y
    memo[e] = out
    return out


def _evaluate(e: Expr, q, p, params, bad, memo):
    if e in memo:
        return memo[e]
    k = e.kind
    if k == "const":
        out = float(e.args[0])
    elif k == "param":
        name = e.args[0]
        if name not in params:
            raise KeyError(f"unbound parameter {name!r}")
        out = float(params[name])
    elif k == "q":
        out = q
    elif k == "p":
        out = p
    elif k == "arctan":
        out = np.arctan(_evaluate(e.args[0], q, p, params, bad, memo))
    elif k == "ln":
        a = _evaluate(e.args[0], q, p, params, bad, memo)
        bad |= np.asarray(a) <= 0
        out = np.log(np.where(np.asarray(a) > 0, a, 1.0))
    elif k == "pow":
        a = _evaluate(e.args[0], q, p, params, bad, memo)
        n = e.args[1]
        if n < 0:
            bad |= np.asarray(a) == 0
        out = np.power(a, float(n)) if n < 0 else a ** n
    else:
        a = _evaluate(e.args[0], q, p, params, bad, memo)
        c = _evaluate(e.args[1], q, p, params, bad, memo)
        if k == "add":
            out = a + c
        elif k == "sub":
            out = a - c
        elif k == "mul":
            out = a * c
        else:
            bad |= np.asarray(c) == 0
            out = a / c
    memo[e] = out
    return out


# ---------------------------------------------------------------------------
# jets


@dataclass
class Jet:
    """Taylor data of a function of (q, p) at a point through total order ``order``.

    ``coeffs[a, b]`` is the Taylor coefficient, i.e. the mixed partial divided
    by a! b!; entries with a + b > order are kept at zero.
    """

    point: tuple[float, float]
    order: int
    coeffs: np.ndarray = field(repr=False)

    @classmethod
    def constant(cls, value: float, point, order: int) -> Jet:
        c = np.zeros((order + 1, order + 1))
        c[0, 0] = value
        return cls(tuple(point), order, c)

    @classmethod
    def variable(cls, which: str, point, order: int) -> Jet:
        j = cls.constant(point[0] if which == "q" else point[1], point, order)
        if order >= 1:
            j.coeffs[(1, 0) if which == "q" else (0, 1)] = 1.0
        return j

    @property
    def value(self) -> float:
        return float(self.coeffs[0, 0])

    def partial(self, a: int, b: int) -> float:
        if a + b > self.order:
            raise ValueError(f"partial of order {a + b} exceeds jet order {self.order}")
        return float(self.coeffs[a, b]) * factorial(a) * factorial(b)

    def partials(self) -> dict:
        k = self.order
        return {(a, b): self.partial(a, b) for a in range(k + 1) for b in range(k + 1 - a)}

    def _mask(self, c):
        k = self.order
        idx = np.add.outer(np.arange(k + 1), np.arange(k + 1))
        c[idx > k] = 0.0
        return c

    def _like(self, c) -> Jet:
        return Jet(self.point, self.order, c)

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._like(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0, 0] += other
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.coeffs * other)
        k = self.order
        out = np.zeros_like(self.coeffs)
        A, B = self.coeffs, other.coeffs
        for a in range(k + 1):
            for b in range(k + 1 - a):
                if A[a, b] == 0.0:
                    continue
                out[a:, b:] += A[a, b] * B[: k + 1 - a, : k + 1 - b]
        return self._like(self._mask(out))

    __rmul__ = __mul__

    def compose(self, series: np.ndarray) -> Jet:
        """g(self) given univariate Taylor coefficients of g at self.value."""
        h = self - self.value
        out = Jet.constant(series[0], self.point, self.order)
        power = Jet.constant(1.0, self.point, self.order)
        for j in range(1, self.order + 1):
            power = power * h
            out = out + power * series[j]
        return out

    def reciprocal(self) -> Jet:
        v = self.value
        if v == 0.0:
            raise SingularPointError("singular sample point: division by zero")
        n = self.order
        return self.compose(np.array([(-1) ** j / v ** (j + 1) for j in range(n + 1)]))

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self._like(self.coeffs / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Jet.constant(1.0, self.point, self.order)
        for _ in range(n):
            out = out * self
        return out

    def log(self) -> Jet:
        v = self.value
        if v <= 0.0:
            raise SingularPointError("singular sample point: ln of a non-positive value")
        n = self.order
        s = np.zeros(n + 1)
        s[0] = np.log(v)
        for j in range(1, n + 1):
            s[j] = (-1) ** (j + 1) / (j * v ** j)
        return self.compose(s)

    def arctan(self) -> Jet:
        v = self.value
        n = self.order
        # arctan' = 1 / (1 + x^2): series of 1/(a + 2 v t + t^2), then integrate
        a = 1.0 + v * v
        den = np.zeros(n + 1)
        den[0] = a
        if n >= 1:
            den[1] = 2 * v
        if n >= 2:
            den[2] = 1.0
        r = np.zeros(n + 1)
        r[0] = 1.0 / a
        for j in range(1, n + 1):
            r[j] = -sum(den[i] * r[j - i] for i in range(1, min(j, 2) + 1)) / a
        s = np.zeros(n + 1)
        s[0] = np.arctan(v)
        for j in range(1, n + 1):
            s[j] = r[j - 1] / j
        return self.compose(s)

    def derivative(self, a: int = 0, b: int = 0) -> Jet:
        """Jet of d_q^a d_p^b f, one order lower per derivative."""
        k = self.order - a - b
        if k < 0:
            raise ValueError("derivative exceeds jet order")
        c = np.zeros((k + 1, k + 1))
        for i in range(k + 1):
            for j in range(k + 1 - i):
                ratio = (factorial(i + a) // factorial(i)) * (factorial(j + b) // factorial(j))
                c[i, j] = self.coeffs[i + a, j + b] * ratio
        return Jet(self.point, k, c)

    def truncate(self, order: int) -> Jet:
        return Jet(self.point, order, self.coeffs[: order + 1, : order + 1].copy())

    def partial_q(self) -> Jet:
        return self.derivative(1, 0)

    def partial_p(self) -> Jet:
        return self.derivative(0, 1)


def _align(a: Jet, b: Jet):
    if a.order == b.order:
        return a, b
    k = min(a.order, b.order)
    return a.truncate(k), b.truncate(k)


def jet_poisson(f: Jet, g: Jet) -> Jet:
    fq, fp, gq, gp = f.partial_q(), f.partial_p(), g.partial_q(), g.partial_p()
    return fq * gp - fp * gq


def eval_jet(e: Expr, q0: float, p0: float, k: int = 3, params: dict | None = None) -> Jet:
    """All partials of e through order k at (q0, p0)."""
    params = params or {}
    point = (float(q0), float(p0))
    memo: dict = {}

    def go(x: Expr) -> Jet:
        if x in memo:
            return memo[x]
        kind = x.kind
        if kind == "const":
            out = Jet.constant(float(x.args[0]), point, k)
        elif kind == "param":
            if x.args[0] not in params:
                raise KeyError(f"unbound parameter {x.args[0]!r}")
            out = Jet.constant(float(params[x.args[0]]), point, k)
        elif kind in ("q", "p"):
            out = Jet.variable(kind, point, k)
        elif kind == "add":
            out = go(x.args[0]) + go(x.args[1])
        elif kind == "sub":
            out = go(x.args[0]) - go(x.args[1])
        elif kind == "mul":
            out = go(x.args[0]) * go(x.args[1])
        elif kind == "div":
            out = go(x.args[0]) / go(x.args[1])
        elif kind == "pow":
            out = go(x.args[0]) ** x.args[1]
        elif kind == "arctan":
            out = go(x.args[0]).arctan()
        elif kind == "ln":
            out = go(x.args[0]).log()
        else:
            raise ValueError(f"unknown node {kind}")
        memo[x] = out
        return out

    try:
        with np.errstate(divide="raise", invalid="raise", over="raise", under="ignore"):
            return go(e)
    except FloatingPointError as exc:
        raise SingularPointError(f"singular sample point (q={q0}, p={p0})") from exc


# ---------------------------------------------------------------------------
# sampled checks


@dataclass
class NumericReport:
    max_residual: float
    mean_residual: float
    samples: int
    seed: int
    tol: float
    passed: bool
    skipped: int = 0

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "passed": self.passed,
            "skipped": self.skipped,
        }


def sample_points(samples: int = 1000, seed: int = DEFAULT_SEED, box: float = 2.0, p_floor: float = P_FLOOR):
    """Uniform q in [-box, box]; p uniform on [-box, -p_floor] U [p_floor, box]."""
    rng = np.random.default_rng(seed)
    q = rng.uniform(-box, box, samples)
    mag = rng.uniform(p_floor, box, samples)
    sign = np.where(rng.random(samples) < 0.5, -1.0, 1.0)
    return q, sign * mag


def residual_report(lhs_vals, rhs_vals, bad, tol, seed, relative=True) -> NumericReport:
    good = ~bad
    if not np.any(good):
        raise EmptySampleError("empty sample set")
    l, r = lhs_vals[good], rhs_vals[good]
    res = np.abs(l - r)
    if relative:
        res = res / np.maximum(1.0, np.abs(r))
    mx = float(res.max())
    return NumericReport(mx, float(res.mean()), int(good.sum()), seed, tol, mx <= tol, int(bad.sum()))


def numeric_identity_check(
    lhs,
    rhs,
    samples: int = 1000,
    tol: float = 1e-9,
    seed: int = DEFAULT_SEED,
    params: dict | None = None,
    box: float = 2.0,
    p_floor: float = P_FLOOR,
) -> NumericReport:
    """Sample both sides; residual |l - r| / max(1, |r|); pass iff max residual <= tol."""
    lhs, rhs = as_expr(lhs), as_expr(rhs)
    if samples <= 0:
        raise EmptySampleError("empty sample set")
    q, p = sample_points(samples, seed, box, p_floor)
    lv, lbad = lhs.evaluate(q, p, params)
    rv, rbad = rhs.evaluate(q, p, params)
    return residual_report(lv, rv, lbad | rbad, tol, seed)


def gaussian_coarse_grain_check(
    f: PhasePoly,
    eta=1.0,
    sigma=1.0,
    tol: float = 1e-10,
    grid: int = 5,
    box: float = 2.0,
    params: dict | None = None,
) -> NumericReport:
    """Gaussian smoothing by Gauss-Hermite quadrature vs the exponential operator action.

    Smoothing: q' = q + sigma sqrt(eta) u, p' = p + sqrt(eta) v / sigma with
    weight exp(-u^2 - v^2) / pi.  Quadrature with n nodes is exact for
    polynomial degree 2n - 1.
    """
    from .transition import husimi

    f = PhasePoly.coerce(f)
    eta_f, sigma_f = float(eta), float(sigma)
    if eta_f <= 0 or sigma_f <= 0:
        raise ValueError("eta and sigma must be positive")
    deg = f.degree()
    nodes, weights = np.polynomial.hermite.hermgauss(deg // 2 + 1)
    pts = np.linspace(-box, box, grid)
    qg, pg = np.meshgrid(pts, pts, indexing="ij")
    qg, pg = qg.ravel(), pg.ravel()

    bind = dict(params or {})
    fe = from_phasepoly(f)
    U, V = np.meshgrid(nodes, nodes, indexing="ij")
    W = np.outer(weights, weights) / np.pi
    sq = np.sqrt(eta_f)
    quad = np.empty(qg.shape)
    for j, (q0, p0) in enumerate(zip(qg, pg)):
        vals, _ = fe.evaluate(q0 + sigma_f * sq * U, p0 + sq * V / sigma_f, bind)
        quad[j] = float(np.sum(W * vals))

    from .scalars import S

    op = husimi(S(eta), S(sigma), order=deg)
    smoothed = from_phasepoly(op.apply(f))
    bind2 = dict(bind)
    for name, val in (("eta", eta_f), ("sigma", sigma_f)):
        bind2.setdefault(name, val)
    exact, bad = smoothed.evaluate(qg, pg, bind2)
    return residual_report(quad, exact, bad, tol, seed=0)
