"""Exact coefficient field: rational functions in real parameters, extended by i.

A ``ParamScalar`` is stored as ``num / den`` where both are sparse polynomials
with integer coefficients.  Monomials are packed into a single Python int,
16 bits per variable; variable 0 is the imaginary unit (exponent 0 or 1,
``i**2`` folded to ``-1`` on every product), variables 1.. are the declared
parameters in declaration order.

Canonical form:

* ``den`` is free of ``i`` (complex denominators are rationalised by the
  conjugate), so numerator and denominator are coprime iff
  ``gcd(den, re(num), im(num)) == 1`` over ``Z[params]``;
* the integer content of ``(num, den)`` is 1;
* the leading coefficient of ``den`` (largest packed monomial) is positive.

Under these rules two scalars are equal as values iff their ``num`` and
``den`` dicts are equal.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import ScalarDivisionError, SingularLimitError

BITS = 16
MASK = (1 << BITS) - 1
MAX_EXPONENT = MASK

Poly = dict  # packed monomial -> nonzero int

_ONE_KEY = 0

DEFAULT_PARAMETERS = (
    "hbar", "m", "omega", "gamma", "eta", "sigma", "phi", "xi", "phip", "xip",
)
RESERVED = frozenset(
    {"i", "q", "p", "dq", "dp", "lq", "lp", "rq", "rp", "Q", "P", "arctan", "ln"}
)

_names: list[str] = []
_index: dict[str, int] = {}


def declare(name: str) -> int:
    """Register a real parameter (idempotent) and return its variable index."""
    if name in _index:
        return _index[name]
    if name in RESERVED or not name.isidentifier():
        raise ValueError(f"invalid parameter name {name!r}")
    _names.append(name)
    _index[name] = len(_names)
    return _index[name]


for _n in DEFAULT_PARAMETERS:
    declare(_n)


def parameters() -> tuple[str, ...]:
    return tuple(_names)


def _shift(name: str) -> int:
    return BITS * declare(name)


# ---------------------------------------------------------------------------
# sparse integer polynomial helpers


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + sign * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pscale(a: Poly, c: int) -> Poly:
    if c == 0:
        return {}
    return {k: c * v for k, v in a.items()}


def _pmul(a: Poly, b: Poly) -> Poly:
    if len(a) == 1 and _ONE_KEY in a:
        return _pscale(b, a[_ONE_KEY])
    if len(b) == 1 and _ONE_KEY in b:
        return _pscale(a, b[_ONE_KEY])
    out: Poly = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            c = ca * cb
            if k & MASK >= 2:
                k -= 2
                c = -c
            v = get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def _pconj(a: Poly) -> Poly:
    return {k: (-c if k & MASK else c) for k, c in a.items()}


def _content(*polys: Poly) -> int:
    g = 0
    for p in polys:
        for c in p.values():
            g = math.gcd(g, c)
            if g == 1:
                return 1
    return g


def _exponents(key: int) -> list[int]:
    out = []
    while key:
        out.append(key & MASK)
        key >>= BITS
    return out


def _pack(exps) -> int:
    key = 0
    for j, e in enumerate(exps):
        if e < 0 or e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} out of range")
        key |= e << (BITS * j)
    return key


def _monomial_gcd(keys) -> int:
    it = iter(keys)
    lo = _exponents(next(it))
    for k in it:
        ex = _exponents(k)
        lo = [min(a, ex[j]) if j < len(ex) else 0 for j, a in enumerate(lo)]
        if not any(lo):
            return 0
    return _pack(lo)


def _all_divisible(p: Poly, key_divisor: int) -> bool:
    return all(_divides(key_divisor, k) for k in p)


def _divides(d: int, k: int) -> bool:
    while d:
        if d & MASK > k & MASK:
            return False
        d >>= BITS
        k >>= BITS
    return True


@lru_cache(maxsize=None)
def _sympy_ring(nvars: int):
    from sympy import ZZ
    from sympy.polys.rings import ring

    return ring(",".join(f"x{j}" for j in range(1, nvars + 1)), ZZ)[0]


def _to_sympy(p: Poly, R, nvars: int):
    d = {}
    for k, c in p.items():
        ex = _exponents(k >> BITS)
        ex += [0] * (nvars - len(ex))
        d[tuple(ex)] = c
    return R.from_dict(d) if d else R.zero


def _from_sympy(f) -> Poly:
    return {_pack((0,) + tuple(m)): int(c) for m, c in f.items()}


def _cancel_general(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    nvars = max(len(_names), 1)
    R = _sympy_ring(nvars)
    re = {k: c for k, c in num.items() if not k & MASK}
    im = {k - 1: c for k, c in num.items() if k & MASK}
    D = _to_sympy(den, R, nvars)
    g = D.gcd(_to_sympy(re, R, nvars))
    if im:
        g = g.gcd(_to_sympy(im, R, nvars))
    if g == 1 or g == -1:
        return num, den
    re2 = _from_sympy(_to_sympy(re, R, nvars).exquo(g))
    im2 = _from_sympy(_to_sympy(im, R, nvars).exquo(g)) if im else {}
    den2 = _from_sympy(D.exquo(g))
    num2 = dict(re2)
    for k, c in im2.items():
        num2[k + 1] = c
    return num2, den2


def _canonical(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise ScalarDivisionError("division by zero scalar")
    if not num:
        return {}, {_ONE_KEY: 1}
    if any(k & MASK for k in den):
        cd = _pconj(den)
        num = _pmul(num, cd)
        den = _pmul(den, cd)
        if not num:
            return {}, {_ONE_KEY: 1}
    if len(den) == 1:
        (dk, dc), = den.items()
        if dk:
            g = _monomial_gcd(list(num) + [dk])
            if g:
                num = {k - g: c for k, c in num.items()}
                den = {dk - g: dc}
    else:
        num, den = _cancel_general(num, den)
    g = _content(num, den)
    lead = den[max(den)]
    if lead < 0:
        g = -g
    if g != 1:
        num = {k: c // g for k, c in num.items()}
        den = {k: c // g for k, c in den.items()}
    return num, den


class ParamScalar:
    """Exact element of Q(i)(hbar, m, omega, ...); immutable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, ParamScalar):
            self.num, self.den = value.num, value.den
        else:
            fr = Fraction(value)
            self.num = {_ONE_KEY: fr.numerator} if fr else {}
            self.den = {_ONE_KEY: fr.denominator}
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> ParamScalar:
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def from_parts(cls, num: Poly, den: Poly | None = None) -> ParamScalar:
        return cls._raw(*_canonical(dict(num), dict(den or {_ONE_KEY: 1})))

    @classmethod
    def param(cls, name: str) -> ParamScalar:
        return cls._raw({1 << _shift(name): 1}, {_ONE_KEY: 1})

    @classmethod
    def from_monomial(cls, coeff, powers: dict[str, int], imag: bool = False):
        """``coeff * i**imag * prod(name**e)``; negative exponents go to the denominator."""
        fr = Fraction(coeff)
        top = 1 if imag else 0
        bottom = 0
        for name, e in powers.items():
            if e > 0:
                top += e << _shift(name)
            elif e < 0:
                bottom += (-e) << _shift(name)
        if not fr:
            return cls(0)
        return cls.from_parts({top: fr.numerator}, {bottom: fr.denominator})

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        """True for elements of Q(i)."""
        return all(k <= 1 for k in self.num) and _ONE_KEY in self.den and len(self.den) == 1

    def is_real(self) -> bool:
        return not any(k & MASK for k in self.num)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and _ONE_KEY in self.den

    def free_parameters(self) -> set[str]:
        out = set()
        for k in list(self.num) + list(self.den):
            for j, e in enumerate(_exponents(k >> BITS), start=1):
                if e:
                    out.add(_names[j - 1])
        return out

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _coerce(x) -> ParamScalar:
        if isinstance(x, ParamScalar):
            return x
        if isinstance(x, (int, Rational)):
            return ParamScalar(x)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        d1, d2 = self.den, o.den
        if len(d1) == 1 and len(d2) == 1 and _ONE_KEY in d1 and _ONE_KEY in d2:
            a, b = d1[_ONE_KEY], d2[_ONE_KEY]
            if a == b:
                num = _padd(self.num, o.num)
                if not num:
                    return ZERO
                g = math.gcd(_content(num), a)
                if g == 1:
                    return ParamScalar._raw(num, d1)
                return ParamScalar._raw({k: c // g for k, c in num.items()}, {_ONE_KEY: a // g})
            num = _padd(_pscale(self.num, b), _pscale(o.num, a))
            if not num:
                return ZERO
            den = a * b
            g = math.gcd(_content(num), den)
            return ParamScalar._raw({k: c // g for k, c in num.items()}, {_ONE_KEY: den // g})
        if d1 == d2:
            return ParamScalar._raw(*_canonical(_padd(self.num, o.num), d1))
        num = _padd(_pmul(self.num, d2), _pmul(o.num, d1))
        return ParamScalar._raw(*_canonical(num, _pmul(d1, d2)))

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar._raw({k: -c for k, c in self.num.items()}, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return ZERO
        d1, d2 = self.den, o.den
        num = _pmul(self.num, o.num)
        if not num:
            return ZERO
        if len(d1) == 1 and len(d2) == 1 and _ONE_KEY in d1 and _ONE_KEY in d2:
            den = d1[_ONE_KEY] * d2[_ONE_KEY]
            if den == 1:
                return ParamScalar._raw(num, d1)
            g = math.gcd(_content(num), den)
            if g == 1:
                return ParamScalar._raw(num, {_ONE_KEY: den})
            return ParamScalar._raw({k: c // g for k, c in num.items()}, {_ONE_KEY: den // g})
        return ParamScalar._raw(*_canonical(num, _pmul(d1, d2)))

    __rmul__ = __mul__

    def inv(self) -> ParamScalar:
        if not self.num:
            raise ScalarDivisionError("division by zero scalar")
        return ParamScalar._raw(*_canonical(dict(self.den), dict(self.num)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    # -- structure ------------------------------------------------------

    def conjugate(self) -> ParamScalar:
        """Complex conjugate; parameters are real so only ``i`` flips sign."""
        return ParamScalar._raw(_pconj(self.num), self.den)

    def real_imag(self) -> tuple[ParamScalar, ParamScalar]:
        re = {k: c for k, c in self.num.items() if not k & MASK}
        im = {k - 1: c for k, c in self.num.items() if k & MASK}
        return (ParamScalar.from_parts(re, self.den) if re else ZERO,
                ParamScalar.from_parts(im, self.den) if im else ZERO)

    def substitute(self, name: str, value) -> ParamScalar:
        """Replace parameter ``name`` by the scalar ``value``."""
        value = self._coerce(value)
        sh = _shift(name)

        def sub(poly: Poly) -> ParamScalar:
            out = ZERO
            for k, c in poly.items():
                e = (k >> sh) & MASK
                rest = ParamScalar._raw({k - (e << sh): c}, {_ONE_KEY: 1})
                out = out + rest * value ** e
            return out

        return sub(self.num) / sub(self.den)

    def hbar_limit(self) -> ParamScalar:
        """Value at hbar = 0; raises ``SingularLimitError`` on a pole there."""
        sh = _shift("hbar")
        hbar_key = 1 << sh
        if _all_divisible(self.den, hbar_key):
            raise SingularLimitError()
        num = {k: c for k, c in self.num.items() if not (k >> sh) & MASK}
        den = {k: c for k, c in self.den.items() if not (k >> sh) & MASK}
        return ParamScalar._raw(*_canonical(num, den)) if num else ZERO

    def hbar_order(self) -> int:
        """Lowest power of hbar in the numerator minus that in the denominator."""
        sh = _shift("hbar")
        if not self.num:
            raise ValueError("zero has no hbar order")
        lo_n = min((k >> sh) & MASK for k in self.num)
        lo_d = min((k >> sh) & MASK for k in self.den)
        return lo_n - lo_d

    def evaluate(self, bindings: dict | None = None) -> complex:
        """Numeric value with parameters bound to numbers."""
        bindings = bindings or {}
        vals = [1j]
        for name in _names:
            vals.append(bindings.get(name))

        def ev(poly: Poly) -> complex:
            total = 0
            for k, c in poly.items():
                term = complex(c)
                for j, e in enumerate(_exponents(k)):
                    if e:
                        v = vals[j]
                        if v is None:
                            raise KeyError(f"unbound parameter {_names[j - 1]!r}")
                        term *= v ** e
                total += term
            return total

        return ev(self.num) / ev(self.den)

    def to_fraction(self) -> Fraction:
        if not self.is_constant() or not self.is_real():
            raise ValueError(f"{self} is not a rational constant")
        return Fraction(self.num.get(_ONE_KEY, 0), self.den[_ONE_KEY])

    def terms(self, which: str = "num"):
        """Yield ``(coeff, imag, {param: exponent})`` for numerator or denominator."""
        poly = self.num if which == "num" else self.den
        for k, c in poly.items():
            ex = _exponents(k)
            imag = bool(ex and ex[0])
            powers = {_names[j - 1]: e for j, e in enumerate(ex) if j and e}
            yield c, imag, powers

    def __repr__(self):
        return f"ParamScalar({str(self)!r})"

    def __str__(self):
        from .parsefmt import format_scalar

        return format_scalar(self)


ZERO = ParamScalar(0)
ONE = ParamScalar(1)
I = ParamScalar._raw({1: 1}, {_ONE_KEY: 1})
HBAR = ParamScalar.param("hbar")


def S(value) -> ParamScalar:
    """Coerce ints, Fractions, floats, names and scalar expressions to ``ParamScalar``."""
    if isinstance(value, ParamScalar):
        return value
    if isinstance(value, str):
        if value == "i":
            return I
        if value.isidentifier():
            return ParamScalar.param(value)
        from .parsefmt import parse_scalar

        return parse_scalar(value)
    if isinstance(value, float):
        return ParamScalar(Fraction(str(value)))
    return ParamScalar(value)
