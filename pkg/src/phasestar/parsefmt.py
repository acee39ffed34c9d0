"""Expression mini-language: tokenizer, parser and canonical printers.

Grammar (implicit multiplication is rejected)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | factor
    factor := atom ['^' ['-'] integer]
    atom   := number | 'i' | 'hbar' | ident | 'q' | 'p' | 'dq' | 'dp'
            | 'arctan' '(' expr ')' | 'ln' '(' expr ')' | '(' expr ')'

Unary minus binds looser than '^', so ``-q^2`` is ``-(q^2)``.  ``dq``/``dp``
are admitted only when parsing operators and must be the rightmost factors
of each top-level term.  ``lq lp rq rp`` (bi-differential operators) and
``Q P`` (operator words) are admitted only in their own contexts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .scalars import RESERVED, ParamScalar, S

GRAMMAR_VERSION = "1"

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)

FUNCTIONS = ("arctan", "ln")
DERIV = ("dq", "dp")
BIVARS = ("lq", "lp", "rq", "rp")
NCVARS = ("Q", "P")


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | end
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            out.append(Token("end", "", n, n))
            return out
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, (pos, pos + 1))
        kind = mt.lastgroup
        start = mt.start(kind)
        out.append(Token(kind, mt.group(kind), start, mt.end()))
        pos = mt.end()


# AST nodes are tuples: (kind, span, *payload)


class _Parser:
    def __init__(self, text: str, allowed: frozenset[str]):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.allowed = allowed

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None, expected=()):
        tok = tok or self.tok
        end = min(max(tok.end, tok.start + 1), len(self.text))
        return ParseError(msg, self.text, (tok.start, end), expected)

    def take(self, text):
        if self.tok.text != text:
            raise self.error(f"expected {text!r}", expected=(text,))
        t = self.tok
        self.i += 1
        return t

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression", expected=("expression",))
        node = self.expr()
        if self.tok.kind != "end":
            exp = ("+", "-", "*", "/", "^", "end of input")
            if self.tok.kind in ("ident", "num") or self.tok.text == "(":
                raise self.error("implicit multiplication is not allowed; use '*'", expected=exp)
            raise self.error(f"unexpected {self.tok.text!r}", expected=exp)
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.tok
            self.i += 1
            rhs = self.term()
            node = ("add" if op.text == "+" else "sub", (node[1][0], rhs[1][1]), node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.tok
            self.i += 1
            rhs = self.unary()
            node = ("mul" if op.text == "*" else "div", (node[1][0], rhs[1][1]), node, rhs)
        return node

    def unary(self):
        if self.tok.text in ("-", "+"):
            op = self.tok
            self.i += 1
            inner = self.unary()
            if op.text == "+":
                return inner
            return ("neg", (op.start, inner[1][1]), inner)
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.tok.text == "^":
            self.i += 1
            sign = 1
            start = self.tok.start
            if self.tok.text == "-":
                sign = -1
                self.i += 1
            t = self.tok
            if t.kind != "num":
                raise self.error("exponent must be an integer", expected=("integer",))
            if "." in t.text:
                raise self.error("non-integer exponent", t)
            self.i += 1
            return ("pow", (base[1][0], t.end), base, sign * int(t.text), (start, t.end))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return ("num", (t.start, t.end), Fraction(t.text))
        if t.text == "(":
            self.i += 1
            inner = self.expr()
            close = self.take(")")
            return ("paren", (t.start, close.end), inner)
        if t.kind == "ident":
            self.i += 1
            name = t.text
            span = (t.start, t.end)
            if name in FUNCTIONS:
                if "func" not in self.allowed:
                    raise ParseError(f"function {name!r} not allowed here", self.text, span)
                self.take("(")
                arg = self.expr()
                close = self.take(")")
                return ("call", (t.start, close.end), name, arg)
            if name == "i":
                return ("i", span)
            if name in ("q", "p"):
                if "qp" not in self.allowed:
                    raise ParseError(f"{name!r} not allowed in scalar context", self.text, span)
                return ("var", span, name)
            if name in DERIV:
                if "deriv" not in self.allowed:
                    raise ParseError(
                        f"derivative symbol {name!r} only allowed in operator context", self.text, span
                    )
                return ("dvar", span, name)
            if name in BIVARS:
                if "bi" not in self.allowed:
                    raise ParseError(f"{name!r} only allowed in bi-differential context", self.text, span)
                return ("bvar", span, name)
            if name in NCVARS:
                if "nc" not in self.allowed:
                    raise ParseError(f"{name!r} only allowed in operator-word context", self.text, span)
                return ("ncvar", span, name)
            if name in RESERVED:
                raise ParseError(f"reserved name {name!r}", self.text, span)
            return ("sym", span, name)
        exp = ("number", "identifier", "(")
        if t.kind == "end":
            raise self.error("unexpected end of input", expected=exp)
        raise self.error(f"unexpected {t.text!r}", expected=exp)


def parse_ast(text: str, allowed=frozenset()):
    return _Parser(text, frozenset(allowed)).parse()


# ---------------------------------------------------------------------------
# AST evaluation


class _Ctx:
    def __init__(self, text):
        self.text = text

    def err(self, msg, node):
        return ParseError(msg, self.text, node[1])


def _eval(node, ctx, leaf, div_check=None, pow_check=None):
    """Fold the AST through arithmetic on whatever ``leaf`` returns."""
    kind = node[0]
    if kind == "paren":
        return _eval(node[2], ctx, leaf, div_check, pow_check)
    if kind in ("add", "sub", "mul", "div"):
        a = _eval(node[2], ctx, leaf, div_check, pow_check)
        b = _eval(node[3], ctx, leaf, div_check, pow_check)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if div_check is not None:
            b = div_check(b, node[3])
        try:
            return a / b
        except ZeroDivisionError:
            raise ctx.err("division by zero", node[3]) from None
    if kind == "neg":
        return -_eval(node[2], ctx, leaf, div_check, pow_check)
    if kind == "pow":
        base = _eval(node[2], ctx, leaf, div_check, pow_check)
        n = node[3]
        if pow_check is not None:
            pow_check(base, n, node)
        try:
            return base ** n
        except ZeroDivisionError:
            raise ctx.err("division by zero", node) from None
    return leaf(node)


def _scalar_leaf(ctx):
    def leaf(node):
        kind = node[0]
        if kind == "num":
            return ParamScalar(node[2])
        if kind == "i":
            return S("i")
        if kind == "sym":
            return S(node[2])
        raise ctx.err(f"{kind} not allowed in scalar context", node)

    return leaf


def parse_scalar(text: str) -> ParamScalar:
    ctx = _Ctx(text)
    return _eval(parse_ast(text), ctx, _scalar_leaf(ctx))


def _phasepoly_from_ast(node, ctx):
    from .phasepoly import PhasePoly

    sleaf = _scalar_leaf(ctx)

    def leaf(n):
        if n[0] == "var":
            return PhasePoly.q() if n[2] == "q" else PhasePoly.p()
        if n[0] == "call":
            raise ctx.err("transcendental functions are not polynomials", n)
        return PhasePoly(sleaf(n))

    def div_check(b, n):
        if any(k != (0, 0) for k in b.terms):
            raise ctx.err("division by a non-constant polynomial", n)
        return b.constant()

    def pow_check(base, e, n):
        if e < 0 and any(k != (0, 0) for k in base.terms):
            raise ctx.err("negative power of a non-constant polynomial", n)

    def pow_fix(base, e):
        if e < 0:
            return PhasePoly(base.constant() ** e)
        return base ** e

    def ev(n):
        kind = n[0]
        if kind == "pow":
            base = ev(n[2])
            pow_check(base, n[3], n)
            return pow_fix(base, n[3])
        if kind == "paren":
            return ev(n[2])
        if kind in ("add", "sub", "mul", "div"):
            a, b = ev(n[2]), ev(n[3])
            if kind == "add":
                return a + b
            if kind == "sub":
                return a - b
            if kind == "mul":
                return a * b
            c = div_check(b, n[3])
            if not c:
                raise ctx.err("division by zero", n[3])
            return a / c
        if kind == "neg":
            return -ev(n[2])
        return leaf(n)

    return ev(node)


def parse_phasepoly(text: str):
    return _phasepoly_from_ast(parse_ast(text, {"qp"}), _Ctx(text))


def _expr_from_ast(node, ctx):
    from . import numeval as ne

    def leaf(n):
        kind = n[0]
        if kind == "num":
            return ne.const(n[2])
        if kind == "sym":
            if n[2] == "hbar":
                return ne.param("hbar")
            return ne.param(n[2])
        if kind == "var":
            return ne.Q if n[2] == "q" else ne.P
        if kind == "i":
            raise ctx.err("expressions are real-valued; 'i' is not allowed", n)
        if kind == "call":
            arg = _eval(n[3], ctx, leaf)
            return ne.arctan(arg) if n[2] == "arctan" else ne.ln(arg)
        raise ctx.err(f"{kind} not allowed in expression context", n)

    return _eval(node, ctx, leaf)


def parse_expr(text: str):
    return _expr_from_ast(parse_ast(text, {"qp", "func"}), _Ctx(text))


def _contains(node, kinds) -> bool:
    if not isinstance(node, tuple):
        return False
    if node[0] in kinds:
        return True
    return any(_contains(x, kinds) for x in node[2:] if isinstance(x, tuple))


def _split_sum(node, sign=1, out=None):
    out = [] if out is None else out
    kind = node[0]
    if kind == "add":
        _split_sum(node[2], sign, out)
        _split_sum(node[3], sign, out)
    elif kind == "sub":
        _split_sum(node[2], sign, out)
        _split_sum(node[3], -sign, out)
    elif kind == "paren" and not _contains(node[2], ("dvar",)):
        out.append((sign, node))
    elif kind == "paren":
        _split_sum(node[2], sign, out)
    else:
        out.append((sign, node))
    return out


def _split_product(node, out=None):
    """Flatten a left-associated mul/div chain into [(op, factor)]."""
    out = [] if out is None else out
    if node[0] in ("mul", "div"):
        _split_product(node[2], out)
        out.append(("*" if node[0] == "mul" else "/", node[3]))
    else:
        out.append(("*", node))
    return out


def parse_operator(text: str):
    """Parse ``sum coeff(q, p) * dq^m * dp^n`` into a ``LocalDiffOp``.

    Coefficients that are polynomials give the exact flavour; anything with
    arctan/ln or a division by q, p gives the numeric (expression) flavour.
    """
    from .localtrans import LocalDiffOp

    ast = parse_ast(text, {"qp", "deriv", "func"})
    ctx = _Ctx(text)
    raw_terms = []
    for sign, term in _split_sum(ast):
        m = n = 0
        coeff_factors = []
        seen_deriv = False
        node = term
        while node[0] == "neg":
            sign = -sign
            node = node[2]
        for op, fac in _split_product(node):
            if fac[0] == "neg" and _contains(fac, ("dvar",)):
                sign = -sign
                fac = fac[2]
            is_deriv = fac[0] == "dvar" or (fac[0] == "pow" and fac[2][0] == "dvar")
            if is_deriv:
                if op == "/":
                    raise ctx.err("cannot divide by a derivative symbol", fac)
                d = fac if fac[0] == "dvar" else fac[2]
                e = 1 if fac[0] == "dvar" else fac[3]
                if e < 0:
                    raise ctx.err("negative power of a derivative symbol", fac)
                if d[2] == "dq":
                    m += e
                else:
                    n += e
                seen_deriv = True
                continue
            if _contains(fac, ("dvar",)):
                raise ctx.err("derivative symbols must stand alone as rightmost factors", fac)
            if seen_deriv:
                raise ctx.err("coefficient appears right of a derivative symbol", fac)
            coeff_factors.append((op, fac))
        raw_terms.append((sign, coeff_factors, m, n))

    def build(factors, conv):
        val = None
        for op, fac in factors:
            x = conv(fac)
            if val is None:
                val = x if op == "*" else conv(("num", fac[1], Fraction(1))) / x
            else:
                val = val * x if op == "*" else val / x
        return val

    def as_poly(fac):
        return _phasepoly_from_ast(fac, ctx)

    def poly_div_guard(factors):
        for op, fac in factors:
            if op == "/":
                d = as_poly(fac)
                if any(k != (0, 0) for k in d.terms):
                    raise ParseError("division by a non-constant polynomial", text, fac[1])

    from .phasepoly import PhasePoly

    exact = True
    try:
        for _, factors, _, _ in raw_terms:
            poly_div_guard(factors)
            for _, fac in factors:
                as_poly(fac)
    except ParseError:
        exact = False

    terms = []
    for sign, factors, m, n in raw_terms:
        if exact:
            val = PhasePoly(1)
            for op, fac in factors:
                x = as_poly(fac)
                val = val * x if op == "*" else val / x.constant()
            terms.append((val if sign > 0 else -val, m, n))
        else:
            from . import numeval as ne

            val = ne.const(1)
            for op, fac in factors:
                x = _expr_from_ast(fac, ctx)
                val = val * x if op == "*" else val / x
            terms.append((val if sign > 0 else -val, m, n))
    return LocalDiffOp(terms)


def parse_diffop(text: str):
    """Parse a constant-coefficient operator into a ``DiffOpSeries``."""
    from .transition import DiffOpSeries

    op = parse_operator(text)
    out = {}
    for (m, n), c in op.terms.items():
        if not op.exact or any(k != (0, 0) for k in c.terms):
            raise ParseError("transition series coefficients must be constants", text, (0, len(text)))
        out[(m, n)] = c.constant()
    return DiffOpSeries(out)


def parse_bidiff(text: str):
    from .bidiff import LP, LQ, RP, RQ, BiDiffOp

    ctx = _Ctx(text)
    sleaf = _scalar_leaf(ctx)
    syms = {"lq": LQ, "lp": LP, "rq": RQ, "rp": RP}

    def leaf(n):
        if n[0] == "bvar":
            return syms[n[2]]
        return BiDiffOp({(0, 0, 0, 0): sleaf(n)})

    def div_check(b, n):
        if any(k != (0, 0, 0, 0) for k in b.terms):
            raise ctx.err("division by a non-constant operator", n)
        return b.coeff(0, 0, 0, 0)

    return _eval(parse_ast(text, {"bi"}), ctx, leaf, div_check)


def parse_ncpoly(text: str):
    from .ordering import NCPoly

    ctx = _Ctx(text)
    sleaf = _scalar_leaf(ctx)

    def leaf(n):
        if n[0] == "ncvar":
            return NCPoly.letter(n[2])
        return NCPoly.scalar(sleaf(n))

    def div_check(b, n):
        if any(w != () for w in b.terms):
            raise ctx.err("division by a non-scalar operator", n)
        return b.terms.get((), S(0))

    return _eval(parse_ast(text, {"nc"}), ctx, leaf, div_check)


def parse(text: str, kind: str = "phasepoly"):
    """Dispatch on ``kind``: scalar | phasepoly | expr | operator | diffop | bidiff | ncpoly."""
    parsers = {
        "scalar": parse_scalar,
        "phasepoly": parse_phasepoly,
        "expr": parse_expr,
        "operator": parse_operator,
        "diffop": parse_diffop,
        "bidiff": parse_bidiff,
        "ncpoly": parse_ncpoly,
    }
    if kind not in parsers:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(parsers)}")
    return parsers[kind](text)


# ---------------------------------------------------------------------------
# printing


def _param_key(name: str):
    return (name != "hbar", name)


def _power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _params_str(powers: dict) -> list[str]:
    return [_power(k, powers[k]) for k in sorted(powers, key=_param_key)]


def _monomial_order(powers: dict):
    total = sum(powers.values())
    return (total, [(-_param_key(k)[0], k, e) for k, e in sorted(powers.items(), key=lambda t: _param_key(t[0]))])


def _int_poly_str(terms: list) -> str:
    """terms: list of (int coeff, imag, powers); printed as a sum."""
    ordered = sorted(terms, key=lambda t: (-sum(t[2].values()), sorted(t[2].items(), key=lambda kv: _param_key(kv[0])), t[1]))
    pieces = []
    for c, imag, powers in ordered:
        factors = []
        if abs(c) != 1:
            factors.append(str(abs(c)))
        if imag:
            factors.append("i")
        factors += _params_str(powers)
        body = "*".join(factors) or "1"
        pieces.append((c < 0, body))
    return _join(pieces)


def _join(pieces) -> str:
    if not pieces:
        return "0"
    out = ""
    for j, (neg, body) in enumerate(pieces):
        if j == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


def _coeff_term(c: ParamScalar, mono: list[str]) -> tuple[bool, str]:
    """Render ``c * mono`` as (negative?, body)."""
    num = list(c.terms("num"))
    den = list(c.terms("den"))
    if len(num) == 1 and len(den) == 1:
        (nc, imag, npow), (dc, _, dpow) = num[0], den[0]
        r = Fraction(nc, dc)
        a, b = abs(r.numerator), r.denominator
        rest = (["i"] if imag else []) + _params_str(npow) + mono
        dparts = _params_str(dpow)
        if rest:
            lead = [f"({a}/{b})"] if b != 1 else ([str(a)] if a != 1 else [])
            body = "*".join(lead + rest)
        else:
            body = str(a)
            if b != 1:
                dparts = [str(b)] + dparts
        if dparts:
            body += "/" + (dparts[0] if len(dparts) == 1 else "(" + "*".join(dparts) + ")")
        return r < 0, body
    num_s = _int_poly_str(num)
    body = f"({num_s})" if len(num) > 1 else num_s
    if not (len(den) == 1 and den[0][0] == 1 and not den[0][2]):
        den_s = _int_poly_str(den)
        single = len(den) == 1 and (den[0][0] == 1 or not den[0][2])
        body += "/" + (den_s if single else f"({den_s})")
    if mono:
        body += "*" + "*".join(mono)
    return False, body


def format_scalar(c: ParamScalar) -> str:
    if not c:
        return "0"
    if list(c.terms("den")) == [(1, False, {})]:
        return _int_poly_str(list(c.terms("num")))
    return _join([_coeff_term(c, [])])


def _qp_mono(n: int, m: int, qn="q", pn="p") -> list[str]:
    out = []
    if n:
        out.append(_power(qn, n))
    if m:
        out.append(_power(pn, m))
    return out


def format_phasepoly(f) -> str:
    keys = sorted(f.terms, key=lambda k: (-(k[0] + k[1]), -k[0]))
    return _join([_coeff_term(f.terms[k], _qp_mono(*k)) for k in keys])


def format_bidiff(D) -> str:
    keys = sorted(D.terms, key=lambda k: (sum(k), tuple(-x for x in k)))
    names = ("lq", "lp", "rq", "rp")
    pieces = []
    for k in keys:
        mono = [_power(nm, e) for nm, e in zip(names, k) if e]
        pieces.append(_coeff_term(D.terms[k], mono))
    return _join(pieces)


def format_diffop(T) -> str:
    keys = sorted(T.terms, key=lambda k: (sum(k), -k[0]))
    return _join([_coeff_term(T.terms[k], _qp_mono(*k, qn="dq", pn="dp")) for k in keys])


def format_localop(op) -> str:
    keys = sorted(op.terms, key=lambda k: (sum(k), -k[0]))
    pieces = []
    for k in keys:
        c = op.terms[k]
        dmono = _qp_mono(*k, qn="dq", pn="dp")
        if op.exact:
            if len(c.terms) == 1:
                ((n, m), s), = c.terms.items()
                pieces.append(_coeff_term(s, _qp_mono(n, m) + dmono))
            else:
                body = "(" + format_phasepoly(c) + ")"
                pieces.append((False, "*".join([body] + dmono)))
        else:
            body = format_expr(c, 2) if dmono else format_expr(c)
            pieces.append((False, "*".join([body] + dmono) if dmono else body))
    return _join(pieces)


def _word_str(word) -> list[str]:
    out = []
    j = 0
    while j < len(word):
        k = j
        while k < len(word) and word[k] == word[j]:
            k += 1
        out.append(_power(word[j], k - j))
        j = k
    return out


def format_ncpoly(A) -> str:
    keys = sorted(A.terms, key=lambda w: (-len(w), [0 if x == "Q" else 1 for x in w]))
    return _join([_coeff_term(A.terms[w], _word_str(w)) for w in keys])


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 4}


def format_expr(e, ctx_prec: int = 0) -> str:
    kind = e.kind
    if kind == "const":
        v = e.args[0]
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if v < 0 or v.denominator != 1:
            return f"({s})" if ctx_prec > 0 else s
        return s
    if kind == "param":
        return e.args[0]
    if kind in ("q", "p"):
        return kind
    if kind in ("arctan", "ln"):
        return f"{kind}({format_expr(e.args[0])})"
    if kind == "pow":
        base = format_expr(e.args[0], 5)
        return f"{base}^{e.args[1]}"
    prec = _PREC[kind]
    a, b = e.args
    left = format_expr(a, prec)
    right = format_expr(b, prec + 1)
    sym = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[kind]
    s = left + sym + right
    return f"({s})" if prec < ctx_prec else s


def to_text(value) -> str:
    """Canonical text for any printable engine value."""
    from .bidiff import BiDiffOp
    from .localtrans import LocalDiffOp
    from .numeval import Expr
    from .ordering import NCPoly
    from .phasepoly import PhasePoly
    from .transition import DiffOpSeries

    if isinstance(value, ParamScalar):
        return format_scalar(value)
    if isinstance(value, PhasePoly):
        return format_phasepoly(value)
    if isinstance(value, BiDiffOp):
        return format_bidiff(value)
    if isinstance(value, DiffOpSeries):
        return format_diffop(value)
    if isinstance(value, LocalDiffOp):
        return format_localop(value)
    if isinstance(value, NCPoly):
        return format_ncpoly(value)
    if isinstance(value, Expr):
        return format_expr(value)
    raise TypeError(f"cannot print {type(value).__name__}")
