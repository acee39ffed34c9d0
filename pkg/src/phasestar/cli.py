"""Command-line front end.  Exit codes: 0 pass, 1 check failure, 2 usage or parse error."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

from . import __version__
from . import bidiff as bd
from . import numeval as ne
from .config import RunConfig
from .errors import InversionTruncationWarning, ParseError, PhaseStarError
from .expsym import PlaneWave, moyal_pw
from .localtrans import LocalDiffOp, ansatz_augmentation, augmentation, damped_theta, local_star_apply
from .ordering import ORDERINGS, normal_order
from .parsefmt import GRAMMAR_VERSION, parse_operator, parse_phasepoly, parse_scalar, to_text
from .phasepoly import PhasePoly, sho_hamiltonian
from .scalars import S
from .transition import CONSTRUCTORS, star_T
from .verify import SUITES, run_suite

PRODUCTS = ("moyal", "born-jordan", "standard", "husimi", "damped", "damped-eta")

# flag -> parameter name used in expressions
PARAM_FLAGS = {"gamma": "gamma", "eta": "eta", "sigma": "sigma", "mass": "m", "omega": "omega"}


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    for flag in PARAM_FLAGS:
        p.add_argument(f"--{flag}", default=None, metavar="VALUE",
                       help=f"value or expression for {PARAM_FLAGS[flag]} (a bare name keeps it symbolic)")
    p.add_argument("--order", type=int, default=10, help="derivative truncation order D")
    p.add_argument("--inv-order", type=int, default=4, help="local inversion order K")
    p.add_argument("--jet-order", type=int, default=3, help="jet order k")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=RunConfig.seed)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasestar", description="Exact phase-space star-product engine")
    parser.add_argument("--version", action="version", version=f"phasestar {__version__} (grammar {GRAMMAR_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("star", help="star product of two symbols")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--product", default="moyal", help="moyal | born-jordan | standard | husimi | damped | damped-eta | local:<theta>")
    s.add_argument("--symbol", choices=("poly", "plane-wave"), default="poly",
                   help="plane-wave: f and g are 'phi,xi' pairs")
    _common(s)

    b = sub.add_parser("bracket", help="Moyal-type bracket f M g")
    b.add_argument("f")
    b.add_argument("g")
    b.add_argument("--product", default="moyal", choices=PRODUCTS)
    _common(b)

    lm = sub.add_parser("limit", help="classical limit of a product's operators")
    lm.add_argument("--op", choices=("moyal-bracket", "star"), default="moyal-bracket")
    lm.add_argument("--product", default="moyal", choices=PRODUCTS)
    _common(lm)

    qz = sub.add_parser("quantize", help="ordered operator image of q^n p^m, normal-ordered")
    qz.add_argument("n", type=int)
    qz.add_argument("m", type=int)
    qz.add_argument("--ordering", choices=tuple(ORDERINGS), default="weyl")
    _common(qz)

    au = sub.add_parser("augment", help="augmentation terms A_theta(q), A_theta(p)")
    au.add_argument("theta", nargs="?", default=None, help="operator text, e.g. 'q*dp + 2*dp^2'")
    au.add_argument("--preset", choices=("damped",), default=None)
    au.add_argument("--hamiltonian", default=None, help="defaults to p^2/(2*m) + m*omega^2*q^2/2")
    au.add_argument("--expect-q", default=None, help="expected A_theta(q) for numeric comparison")
    au.add_argument("--expect-p", default=None, help="expected A_theta(p) for numeric comparison")
    au.add_argument("--route", choices=("general", "ansatz"), default="general")
    _common(au)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=" | ".join(list(SUITES) + ["all"]))
    _common(v)
    return parser


def _config(args) -> RunConfig:
    try:
        return RunConfig(args.order, args.inv_order, args.jet_order, args.tol, args.samples, args.seed, args.format)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _bindings(args) -> dict:
    """Flag values as scalars; a bare identifier keeps the canonical symbol."""
    out = {}
    for flag, name in PARAM_FLAGS.items():
        raw = getattr(args, flag, None)
        if raw is None:
            continue
        raw = raw.strip()
        if raw.isidentifier():
            continue
        out[name] = parse_scalar(raw)
    return out


def _param(bind: dict, name: str):
    return bind.get(name, S(name))


def _substitute(f: PhasePoly, bind: dict) -> PhasePoly:
    for name, v in bind.items():
        f = f.substitute_param(name, v)
    return f


def _star_operator(product: str, order: int, bind: dict) -> bd.BiDiffOp:
    g, m, eta, sigma = (_param(bind, k) for k in ("gamma", "m", "eta", "sigma"))
    if product == "moyal":
        return bd.moyal_star(order)
    if product == "damped":
        return bd.damped_star(g, m, order)
    if product == "husimi":
        T = CONSTRUCTORS["husimi"](eta, sigma, order)
    elif product == "damped-eta":
        T = CONSTRUCTORS["damped-eta"](g, eta, m, order)
    elif product in ("born-jordan", "standard"):
        T = CONSTRUCTORS[product](order)
    else:
        raise UsageError(f"unknown product {product!r}; choose from {', '.join(PRODUCTS)} or local:<theta>")
    return star_T(T, order)


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        payload = dict(payload)
        payload.setdefault("grammar", GRAMMAR_VERSION)
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text)


def cmd_star(args) -> int:
    cfg = _config(args)
    bind = _bindings(args)
    if args.symbol == "plane-wave":
        u, v = (_wave(x) for x in (args.f, args.g))
        if args.product != "moyal":
            raise UsageError("plane-wave symbols support only --product moyal")
        w = moyal_pw(u, v)
        _emit(args, {"command": "star", "symbol": "plane-wave", "result": str(w),
                     "phase": to_text(w.exponent), "phi": to_text(w.phi), "xi": to_text(w.xi)}, str(w))
        return 0
    f = _substitute(parse_phasepoly(args.f), bind)
    g = _substitute(parse_phasepoly(args.g), bind)
    need = f.degree() + g.degree()
    if args.product.startswith("local:"):
        theta = parse_operator(args.product[len("local:"):])
        if not theta.exact:
            raise UsageError("local products need polynomial coefficients; "
                             "transcendental coefficients are only supported by 'augment'")
        T = LocalDiffOp.identity() + theta
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", InversionTruncationWarning)
            res = local_star_apply(T, f, g, cfg.inv_order)
        exact = not any(issubclass(w.category, InversionTruncationWarning) for w in caught)
        if not exact:
            print(f"warning: inversion truncation not exact at K={cfg.inv_order}", file=sys.stderr)
        _emit(args, {"command": "star", "product": args.product, "result": to_text(res), "exact": exact}, to_text(res))
        return 0
    order = max(cfg.order, need)
    res = _star_operator(args.product, order, bind).apply(f, g)
    _emit(args, {"command": "star", "product": args.product, "order": order, "result": to_text(res)}, to_text(res))
    return 0


def _wave(text: str) -> PlaneWave:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"plane wave must be given as 'phi,xi', got {text!r}")
    return PlaneWave.make(parse_scalar(parts[0]), parse_scalar(parts[1]))


def cmd_bracket(args) -> int:
    cfg = _config(args)
    bind = _bindings(args)
    f = _substitute(parse_phasepoly(args.f), bind)
    g = _substitute(parse_phasepoly(args.g), bind)
    order = max(cfg.order, f.degree() + g.degree())
    M = bd.moyal_bracket_op(_star_operator(args.product, order, bind))
    res = M.apply(f, g)
    _emit(args, {"command": "bracket", "product": args.product, "order": order, "result": to_text(res)}, to_text(res))
    return 0


def cmd_limit(args) -> int:
    cfg = _config(args)
    bind = _bindings(args)
    star = _star_operator(args.product, cfg.order, bind)
    op = bd.moyal_bracket_op(star) if args.op == "moyal-bracket" else star
    res = op.classical_limit()
    _emit(args, {"command": "limit", "op": args.op, "product": args.product, "order": cfg.order,
                 "result": to_text(res)}, to_text(res))
    return 0


def cmd_quantize(args) -> int:
    _config(args)
    if args.n < 0 or args.m < 0:
        raise UsageError("n and m must be nonnegative")
    res = normal_order(ORDERINGS[args.ordering](args.n, args.m))
    _emit(args, {"command": "quantize", "ordering": args.ordering, "n": args.n, "m": args.m,
                 "result": to_text(res)}, to_text(res))
    return 0


def cmd_augment(args) -> int:
    cfg = _config(args)
    bind = _bindings(args)
    expect = {"q": args.expect_q, "p": args.expect_p}
    if args.preset == "damped":
        if args.theta is not None:
            raise UsageError("give either a theta expression or --preset, not both")
        defaults = {"m": S(1), "omega": S(1), "gamma": S(Fraction(1, 100))}
        defaults.update(bind)
        bind = defaults
        theta = damped_theta(*(ne.as_expr(bind[k]) for k in ("m", "omega", "gamma")))
        expect = {"q": expect["q"] or "0", "p": expect["p"] or f"-2*({to_text(bind['gamma'])})*p"}
    elif args.theta is None:
        raise UsageError("augment needs a theta expression or --preset damped")
    else:
        theta = parse_operator(args.theta)
    route = augmentation if args.route == "general" else ansatz_augmentation

    if theta.exact and args.preset is None:
        H = parse_phasepoly(args.hamiltonian) if args.hamiltonian else sho_hamiltonian()
        H = _substitute(H, bind)
        theta = theta.substitute_param(bind) if bind else theta
        res = {x: route(theta, H, x) for x in ("q", "p")}
        text = "\n".join(f"A(theta)({x}) = {to_text(v)}" for x, v in res.items())
        _emit(args, {"command": "augment", "flavor": "exact", "route": args.route,
                     "A_q": to_text(res["q"]), "A_p": to_text(res["p"])}, text)
        return 0

    # numeric flavour: every parameter must be bound to a number
    H = ne.as_expr(parse_phasepoly(args.hamiltonian)) if args.hamiltonian else None
    if H is None:
        from .localtrans import sho_expr

        H = sho_expr()
    num = {k: v.evaluate({}).real for k, v in bind.items() if not v.free_parameters()}
    reports = {}
    ok = True
    for x in ("q", "p"):
        A = route(theta, H, x)
        target = ne.as_expr(expect[x] or "0")
        missing = (A.free_parameters() | target.free_parameters()) - set(num)
        if missing:
            raise UsageError(f"numeric augmentation needs values for: {', '.join(sorted(missing))}")
        rep = ne.numeric_identity_check(A, target, cfg.samples, cfg.tol, cfg.seed, num)
        reports[x] = rep
        ok &= rep.passed
    lines = [
        f"A(theta)({x}) vs {expect[x] or '0'}: max residual {r.max_residual:.3e}, mean {r.mean_residual:.3e}, "
        f"samples {r.samples}, seed {r.seed}, tol {r.tol:g}: {'pass' if r.passed else 'fail'}"
        for x, r in reports.items()
    ]
    _emit(args, {"command": "augment", "flavor": "numeric", "route": args.route,
                 "reports": {x: r.as_dict() for x, r in reports.items()}, "status": "pass" if ok else "fail"},
          "\n".join(lines))
    return 0 if ok else 1


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    results = run_suite(args.suite, cfg)
    ok = all(r.passed for r in results)
    if args.format == "json":
        print(json.dumps({
            "suite": args.suite,
            "grammar": GRAMMAR_VERSION,
            "config": cfg.as_dict(),
            "status": "pass" if ok else "fail",
            "checks": [r.as_dict() for r in results],
        }, indent=2))
    else:
        for r in results:
            res = f" residual={r.residual:.3e}" if r.residual is not None else ""
            print(f"{r.status.upper():4} {r.check_id} [{r.identity}] {r.runtime_ms:.1f} ms{res}")
            if r.detail:
                print(f"     {r.detail}")
        print(f"suite {args.suite}: {'pass' if ok else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)})")
    return 0 if ok else 1


COMMANDS = {
    "star": cmd_star,
    "bracket": cmd_bracket,
    "limit": cmd_limit,
    "quantize": cmd_quantize,
    "augment": cmd_augment,
    "verify": cmd_verify,
}


def _caret(err: ParseError) -> str:
    a, b = err.span
    return f"  {err.text}\n  {' ' * a}{'^' * max(1, b - a)}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc.message}", file=sys.stderr)
        print(_caret(exc), file=sys.stderr)
        if exc.expected:
            print(f"  expected one of: {', '.join(exc.expected)}", file=sys.stderr)
        return 2
    except (UsageError, PhaseStarError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
