"""Operator words in Q, P with the Heisenberg relation, and the ordering maps."""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import comb

from .bidiff import moyal_star
from .phasepoly import PhasePoly
from .scalars import HBAR, I, ONE, ZERO, ParamScalar, S
from .transition import DiffOpSeries, born_jordan, invert, standard

Word = tuple  # of "Q" / "P"


class NCPoly:
    """Sparse map from words over {Q, P} to ``ParamScalar``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {tuple(w): S(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, terms):
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def letter(cls, name: str) -> NCPoly:
        if name not in ("Q", "P"):
            raise ValueError(f"unknown letter {name!r}")
        return cls._raw({(name,): ONE})

    @classmethod
    def scalar(cls, c) -> NCPoly:
        c = S(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def word(cls, word, coeff=1) -> NCPoly:
        return cls({tuple(word): coeff})

    @classmethod
    def normal_monomial(cls, a: int, b: int, coeff=1) -> NCPoly:
        return cls.word(("Q",) * a + ("P",) * b, coeff)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            try:
                other = _coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out[w] + c if w in out else c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> NCPoly:
        c = S(c)
        if not c:
            return NCPoly()
        return NCPoly._raw({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                v = c1 * c2
                if w in out:
                    v = out[w] + v
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        return NCPoly._raw(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(S(other).inv())

    def __pow__(self, n: int):
        out = NCPoly.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> NCPoly:
        """Reverse every word and conjugate its coefficient."""
        return NCPoly._raw({w[::-1]: c.conjugate() for w, c in self.terms.items()})

    def normal_order(self) -> NCPoly:
        return normal_order(self)

    def is_normal(self) -> bool:
        return all(_is_normal_word(w) for w in self.terms)

    def is_hermitian(self) -> bool:
        return normal_order(self.adjoint()) == normal_order(self)

    def __repr__(self):
        return f"NCPoly({str(self)!r})"

    def __str__(self):
        from .parsefmt import format_ncpoly

        return format_ncpoly(self)


def _coerce(x) -> NCPoly:
    return x if isinstance(x, NCPoly) else NCPoly.scalar(x)


def _is_normal_word(w) -> bool:
    return "Q" not in w[w.index("P"):] if "P" in w else True


@lru_cache(maxsize=None)
def _normal_word(word: tuple) -> tuple:
    """Normal form of a word as ((a, b), coeff) pairs, built letter by letter.

    Right-multiplying Q^a P^b by Q uses P^b Q = Q P^b - i hbar b P^(b-1).
    """
    state: dict = {(0, 0): ONE}
    ih = I * HBAR
    for letter in word:
        nxt: dict = {}

        def acc(k, v):
            v = nxt[k] + v if k in nxt else v
            if v:
                nxt[k] = v
            else:
                nxt.pop(k, None)

        for (a, b), c in state.items():
            if letter == "P":
                acc((a, b + 1), c)
            else:
                acc((a + 1, b), c)
                if b:
                    acc((a, b - 1), c * (-ih * b))
        state = nxt
    return tuple(state.items())


def normal_order(A: NCPoly) -> NCPoly:
    """Rewrite every word to Q^a P^b using P Q -> Q P - i hbar."""
    out: dict = {}
    for w, c in A.terms.items():
        for (a, b), v in _normal_word(w):
            key = ("Q",) * a + ("P",) * b
            v = v * c
            if key in out:
                v = out[key] + v
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return NCPoly._raw(out)


def _normal_key(w) -> tuple[int, int]:
    return (w.count("Q"), w.count("P"))


# ---------------------------------------------------------------------------
# ordering maps on monomials


def weyl_quantize(n: int, m: int) -> NCPoly:
    """Symmetrized image of q^n p^m: 2^-n sum_l C(n, l) Q^(n-l) P^m Q^l."""
    _check_nm(n, m)
    out = NCPoly()
    for l in range(n + 1):
        w = ("Q",) * (n - l) + ("P",) * m + ("Q",) * l
        out = out + NCPoly.word(w, ParamScalar(comb(n, l)) / 2 ** n)
    return out


def weyl_permutation_average(n: int, m: int) -> NCPoly:
    """Average over all distinct orderings of n Q's and m P's (factorial cost)."""
    _check_nm(n, m)
    words = set(permutations(("Q",) * n + ("P",) * m))
    c = ParamScalar(1) / len(words)
    return NCPoly({w: c for w in words})


def bj_quantize(n: int, m: int) -> NCPoly:
    """(1/(n+1)) sum_k Q^(n-k) P^m Q^k."""
    _check_nm(n, m)
    c = ParamScalar(1) / (n + 1)
    out = NCPoly()
    for k in range(n + 1):
        out = out + NCPoly.word(("Q",) * (n - k) + ("P",) * m + ("Q",) * k, c)
    return out


def std_quantize(n: int, m: int) -> NCPoly:
    _check_nm(n, m)
    return NCPoly.normal_monomial(n, m)


ORDERINGS = {"weyl": weyl_quantize, "born-jordan": bj_quantize, "standard": std_quantize}


def _check_nm(n, m):
    if n < 0 or m < 0:
        raise ValueError("monomial exponents must be nonnegative")


def quantize_poly(f: PhasePoly, ordering: str = "weyl") -> NCPoly:
    """Linear extension of a monomial ordering map, returned normal-ordered."""
    fn = ORDERINGS[ordering]
    out = NCPoly()
    for (n, m), c in PhasePoly.coerce(f).terms.items():
        out = out + normal_order(fn(n, m)).scale(c)
    return out


def weyl_quantize_poly(f: PhasePoly) -> NCPoly:
    return quantize_poly(f, "weyl")


def weyl_dequantize(A: NCPoly) -> PhasePoly:
    """Inverse of the Weyl map: peel off the leading normal monomial repeatedly.

    The normal-ordered Weyl image of q^a p^b is Q^a P^b plus words of strictly
    lower length, so the system is triangular with unit diagonal.
    """
    rest = normal_order(A)
    out: dict = {}
    while rest.terms:
        w = max(rest.terms, key=lambda w: (len(w), _normal_key(w)))
        c = rest.terms[w]
        a, b = _normal_key(w)
        out[(a, b)] = out.get((a, b), ZERO) + c
        rest = rest - normal_order(weyl_quantize(a, b)).scale(c)
    return PhasePoly({k: v for k, v in out.items() if v})


def homomorphism_check(f, g) -> bool:
    """Weyl symbol of Q0(f) Q0(g) equals f *0 g."""
    f, g = PhasePoly.coerce(f), PhasePoly.coerce(g)
    lhs = weyl_dequantize(weyl_quantize_poly(f) * weyl_quantize_poly(g))
    rhs = moyal_star(max(f.degree() + g.degree(), 0)).apply(f, g)
    return lhs == rhs


TRANSITIONS = {"born-jordan": born_jordan, "standard": standard}


def ordering_transition_check(n: int, m: int, ordering: str = "born-jordan", relation: str = "forward") -> bool:
    """Compare an ordering's image of q^n p^m with the Weyl image of a transformed symbol.

    ``relation="forward"`` tests Q(q^n p^m) = Q0(T q^n p^m); ``"inverse"``
    tests Q0(T^-1 q^n p^m).  With the sinc / exp(+i hbar dq dp / 2) operators
    it is the forward relation that holds.
    """
    if ordering not in TRANSITIONS:
        raise ValueError(f"no transition operator for ordering {ordering!r}")
    order = n + m
    T = TRANSITIONS[ordering](order)
    if relation == "inverse":
        T = invert(T, order)
    elif relation != "forward":
        raise ValueError("relation must be 'forward' or 'inverse'")
    symbol = T.apply(PhasePoly.monomial(n, m))
    lhs = normal_order(ORDERINGS[ordering](n, m))
    return lhs == weyl_quantize_poly(symbol)


def symbol_of(A: NCPoly, ordering: str = "weyl", order: int | None = None) -> PhasePoly:
    """Symbol of A in the given ordering, via the Weyl symbol and T^-1."""
    f = weyl_dequantize(A)
    if ordering == "weyl":
        return f
    order = f.degree() if order is None else order
    T: DiffOpSeries = TRANSITIONS[ordering](order)
    return invert(T, order).apply(f)
