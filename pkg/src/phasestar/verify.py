"""Named verification suites.  Each check returns a ``CheckResult``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bidiff as bd
from . import numeval as ne
from .config import RunConfig
from .expsym import PlaneWave, bidiff_on_plane_waves, commutator_phase, moyal_pw, phase_series
from .localtrans import (
    ansatz_augmentation,
    augmentation,
    damped_theta,
    damped_theta_01_derivative,
    midpoint_identity_check,
    midpoint_product_check,
    sho_expr,
)
from .ordering import homomorphism_check, ordering_transition_check, weyl_dequantize, weyl_quantize
from .phasepoly import PhasePoly, sho_hamiltonian
from .sampling import random_local_op, random_phasepoly, random_transition, rng
from .scalars import HBAR, I, S
from .transition import (
    damped,
    damped_eta,
    hbar_zero_part,
    husimi,
    odot,
    star_T,
    verify_classical_limit_theorem,
)


@dataclass
class CheckResult:
    suite: str
    check_id: str
    identity: str
    status: str  # "pass" | "fail"
    runtime_ms: float
    residual: float | None = None
    detail: str = ""
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "check-id": self.check_id,
            "identity": self.identity,
            "status": self.status,
            "runtime-ms": round(self.runtime_ms, 3),
        }
        if self.residual is not None:
            out["residual"] = self.residual
        if self.detail:
            out["detail"] = self.detail
        return out


def _run(suite, check_id, identity, fn) -> CheckResult:
    t0 = time.perf_counter()
    ok, residual, detail, data = fn()
    ms = (time.perf_counter() - t0) * 1000
    return CheckResult(suite, check_id, identity, "pass" if ok else "fail", ms, residual, detail, data)


def _all(checks: dict) -> tuple[bool, str]:
    failed = [k for k, v in checks.items() if not v]
    return not failed, "failed: " + ", ".join(failed) if failed else "all sub-checks hold"


# ---------------------------------------------------------------------------
# moyal-core


def check_moyal_associativity(cfg: RunConfig, triples: int = 100, max_degree: int = 5) -> CheckResult:
    def body():
        r = rng(cfg.seed + 1)
        star = bd.moyal_star(3 * max_degree)
        bad = 0
        for _ in range(triples):
            f, g, h = (random_phasepoly(r, max_degree) for _ in range(3))
            if not bd.associativity_check(star, f, g, h):
                bad += 1
        return bad == 0, None, f"{triples - bad}/{triples} triples associative (degree <= {max_degree})", {}

    return _run("moyal-core", "c01-moyal-associativity", "(f *0 g) *0 h = f *0 (g *0 h)", body)


def check_sine_bracket(cfg: RunConfig, order: int = 7) -> CheckResult:
    def body():
        M0 = bd.moyal_bracket_op(bd.moyal_star(order))
        ok = M0 == bd.sine_bracket_series(order)
        return ok, None, f"compared through derivative order {order}", {}

    return _run("moyal-core", "c02-sine-bracket", "M0 = 2 sin(hbar P / 2) / hbar", body)


def check_moyal_classical_limit(cfg: RunConfig) -> CheckResult:
    def body():
        lim = bd.moyal_bracket_op(bd.moyal_star(cfg.order)).classical_limit()
        return lim == bd.poisson_op(), None, f"limit = {lim}", {}

    return _run("moyal-core", "c03-moyal-classical-limit", "lim_{hbar->0} M0 = P", body)


# ---------------------------------------------------------------------------
# husimi


def check_husimi(cfg: RunConfig, order: int = 8) -> CheckResult:
    def body():
        T = husimi(order=order)
        od = odot(T, order)
        closed = bd.exp_series(
            (bd.LQ * bd.RQ).scale(S("eta") * S("sigma") ** 2 / 2) + (bd.LP * bd.RP).scale(S("eta") / (2 * S("sigma") ** 2)),
            order,
        )
        M0 = bd.moyal_bracket_op(bd.moyal_star(order))
        Meta = bd.moyal_bracket_op(star_T(T, order))
        checks = {
            "odot closed form": od == closed,
            "M_eta = M0 odot_eta": Meta == (M0 * od).truncate(order),
            "odot symmetric": od.is_symmetric(),
            "lim M_eta = P odot_eta": Meta.classical_limit() == (bd.poisson_op() * od).truncate(order),
            "theorem verifier": verify_classical_limit_theorem(T, order),
        }
        ok, detail = _all(checks)
        return ok, None, detail + f" (order {order})", {}

    return _run("husimi", "c04-husimi-identities", "M_eta = M0 odot_eta; odot_eta^t = odot_eta; lim M_eta = P odot_eta", body)


# ---------------------------------------------------------------------------
# damped


def damped_reality_difference(f: PhasePoly, order: int) -> PhasePoly:
    """f M_gamma H - f M0 H for the oscillator Hamiltonian."""
    H = sho_hamiltonian()
    Mg = bd.moyal_bracket_op(bd.damped_star(order=order))
    M0 = bd.moyal_bracket_op(bd.moyal_star(order))
    return Mg.apply(f, H) - M0.apply(f, H)


def check_damped_pathology(cfg: RunConfig, samples: int = 50, sign: int = +1) -> CheckResult:
    """Adjoint, classical limit and the reality identity with i gamma hbar dq dp f.

    ``sign`` selects the sign of the right-hand side of the reality identity.
    +1 is the form as usually quoted; with M = (* - *^t)/(i hbar) the
    identity actually holds with -1 (the +1 form holds for H M_gamma f).
    """

    def body():
        D = cfg.order
        sg = bd.damped_star(order=D)
        adj_expected = bd.moyal_star(D) * bd.exp_series((bd.LP * bd.RP).scale(I * HBAR * S("gamma") * S("m")), D)
        r = rng(cfg.seed + 5)
        bad = 0
        for _ in range(samples):
            f = random_phasepoly(r, 5)
            rhs = f.derivative(1, 1).scale(I * S("gamma") * HBAR * sign)
            if damped_reality_difference(f, D) != rhs:
                bad += 1
        checks = {
            "adjoint(*_gamma) = *0 exp(+i hbar gamma m lp rp)": sg.adjoint() == adj_expected,
            "adjoint(*_gamma) != *_gamma": sg.adjoint() != sg,
            "star_T(T_gamma) = *_gamma": star_T(damped(order=D), D) == sg,
            "lim M_gamma = P": bd.moyal_bracket_op(sg).classical_limit() == bd.poisson_op(),
            f"reality identity ({samples - bad}/{samples})": bad == 0,
        }
        ok, detail = _all(checks)
        return ok, None, detail, {"reality_failures": bad}

    s = "+" if sign > 0 else "-"
    return _run(
        "damped",
        "c05-damped-pathology" if sign > 0 else "c05-damped-pathology-opposite-sign",
        f"*_gamma^dagger != *_gamma; lim M_gamma = P; f M_gamma H - f M0 H = {s}i gamma hbar dq dp f",
        body,
    )


def check_hermitian_damped(cfg: RunConfig, order: int = 8) -> CheckResult:
    def body():
        T = damped_eta(order=order)
        st = star_T(T, order)
        target = (
            bd.poisson_op() * bd.exp_series((bd.LP * bd.RP).scale(-2 * S("eta") * S("gamma") * S("m")), order)
        ).truncate(order)
        checks = {
            "*_{gamma,eta} Hermitian": st.is_hermitian(),
            "lim M_{gamma,eta} = P exp(-2 eta gamma m lp rp)": bd.moyal_bracket_op(st).classical_limit() == target,
            "T_{gamma,eta} is hbar-independent": hbar_zero_part(T) == T,
        }
        ok, detail = _all(checks)
        return ok, None, detail + f" (order {order})", {}

    return _run("damped", "c06-hermitian-damped", "*_{gamma,eta}^dagger = *_{gamma,eta}; lim M = P exp(-2 eta gamma m lp rp)", body)


def check_damped_eom(cfg: RunConfig) -> CheckResult:
    def body():
        Pg = bd.damped_poisson()
        H = sho_hamiltonian()
        q, p = PhasePoly.q(), PhasePoly.p()
        m, w, g = S("m"), S("omega"), S("gamma")
        qdot = Pg.apply(q, H)
        pdot = Pg.apply(p, H)
        checks = {
            "q P_gamma H = p/m": qdot == p / m,
            "p P_gamma H = -m omega^2 q - 2 gamma p": pdot == q.scale(-m * w * w) - p.scale(2 * g),
        }
        ok, detail = _all(checks)
        return ok, None, f"{detail}; qdot = {qdot}; pdot = {pdot}", {}

    return _run("damped", "c10-damped-eom", "q P_gamma H = p/m; p P_gamma H = -m omega^2 q - 2 gamma p", body)


# ---------------------------------------------------------------------------
# no-go


def find_nonassociativity_witness(seed: int, max_degree: int = 3, attempts: int = 500, order: int = 9):
    """First seeded triple with (a *_g b) *_{-g} c != a *_g (b *_{-g} c)."""
    sp = bd.damped_star(S("gamma"), order=order)
    sm = bd.damped_star(-S("gamma"), order=order)
    r = rng(seed)
    for k in range(attempts):
        a, b, c = (random_phasepoly(r, max_degree, -3, 3) for _ in range(3))
        if not bd.mixed_associativity_check(sp, sm, a, b, c):
            return (a, b, c), k + 1
    return None, attempts


def check_nonassociativity(cfg: RunConfig) -> CheckResult:
    def body():
        witness, tried = find_nonassociativity_witness(cfg.seed + 7)
        if witness is None:
            return False, None, f"no witness in {tried} triples", {}
        a, b, c = witness
        sp = bd.damped_star(S("gamma"), order=9)
        sm = bd.damped_star(-S("gamma"), order=9)
        lhs = sm.apply(sp.apply(a, b), c)
        rhs = sp.apply(a, sm.apply(b, c))
        # a second, hand-sized witness: (p *_g 1) *_{-g} p vs p *_g (1 *_{-g} p)
        p1, one = PhasePoly.p(), PhasePoly(1)
        small = sm.apply(sp.apply(p1, one), p1) != sp.apply(p1, sm.apply(one, p1))
        ok = lhs != rhs and small
        detail = f"witness after {tried} triples: a = {a}; b = {b}; c = {c}"
        return ok, None, detail, {"a": str(a), "b": str(b), "c": str(c), "difference": str(lhs - rhs)}

    return _run("no-go", "c07-nonassociativity-witness", "(a *_gamma b) *_{-gamma} c != a *_gamma (b *_{-gamma} c)", body)


def _theorem_population(cfg: RunConfig, count: int = 25):
    r = rng(cfg.seed + 8)
    return [(k % 2 == 0, random_transition(r, 4, t0_one=(k % 2 == 0))) for k in range(count)]


def check_no_go(cfg: RunConfig, count: int = 25, order: int = 8) -> CheckResult:
    def body():
        bad = 0
        n_one = 0
        for t0_one, T in _theorem_population(cfg, count):
            n_one += t0_one
            if not verify_classical_limit_theorem(T.truncate(order), order):
                bad += 1
        ok = bad == 0 and 0 < n_one < count
        detail = f"{count - bad}/{count} transition operators ({n_one} with T0 = 1); shared order {order}"
        return ok, None, detail, {}

    return _run("no-go", "c08-no-go-theorem", "lim M_T = P odot_{T0}", body)


def check_no_augmentation(cfg: RunConfig, count: int = 25, order: int = 8) -> CheckResult:
    def body():
        bad = 0
        n = 0
        for t0_one, T in _theorem_population(cfg, count):
            if not t0_one:
                continue
            n += 1
            if hbar_zero_part(T) != type(T).identity():
                bad += 1
                continue
            T = T.truncate(order)
            lim = bd.moyal_bracket_op(star_T(T, order)).classical_limit()
            if lim != bd.poisson_op():
                bad += 1
        return bad == 0 and n > 0, None, f"{n - bad}/{n} operators with T0 = 1 give exactly P", {}

    return _run("no-go", "c09-no-augmentation", "T0 = 1 => lim M_T = P", body)


# ---------------------------------------------------------------------------
# damped-local


def check_damped_local(cfg: RunConfig, gamma=Fraction(1, 100)) -> CheckResult:
    def body():
        bind = {"m": 1, "omega": 1, "gamma": gamma}
        th = damped_theta(1, 1, gamma)
        H = sho_expr(1, 1)
        q, p = ne.sample_points(cfg.samples, cfg.seed)
        g = float(gamma)
        Aq, bq = augmentation(th, H, "q").evaluate(q, p)
        Ap, bp = augmentation(th, H, "p").evaluate(q, p)
        Bq, cq = ansatz_augmentation(th, H, "q").evaluate(q, p)
        Bp, cp = ansatz_augmentation(th, H, "p").evaluate(q, p)
        bad = bq | bp | cq | cp
        good = ~bad
        scale = np.maximum(1.0, np.abs(p[good]))
        r_q = float(np.abs(Aq[good]).max())
        r_p = float((np.abs(Ap[good] + 2 * g * p[good]) / scale).max())
        r_bq = float(np.abs(Bq[good]).max())
        r_bp = float((np.abs(Bp[good] + 2 * g * p[good]) / scale).max())
        agree = float(max(np.abs(Aq - Bq)[good].max(), np.abs(Ap - Bp)[good].max()))
        deriv = ne.numeric_identity_check(
            damped_theta().coeff(0, 1).partial_p(), damped_theta_01_derivative(), cfg.samples, 1e-10, cfg.seed, bind
        )
        tol = 1e-9
        checks = {
            "general A(q)": r_q <= tol,
            "general A(p) + 2 gamma p": r_p <= tol,
            "ansatz A(q)": r_bq <= tol,
            "ansatz A(p) + 2 gamma p": r_bp <= tol,
            "routes agree": agree <= 1e-10,
            "dp theta_01 antiderivative": deriv.passed,
            "no singular samples": int(good.sum()) == cfg.samples,
        }
        ok, detail = _all(checks)
        res = max(r_q, r_p, r_bq, r_bp)
        data = {"A_q": r_q, "A_p": r_p, "ansatz_q": r_bq, "ansatz_p": r_bp, "agreement": agree}
        return ok, res, detail + f" over {int(good.sum())} samples", data

    return _run("damped-local", "c11-damped-local-oscillator", "A_theta(q) = 0; A_theta(p) = -2 gamma p", body)


# ---------------------------------------------------------------------------
# orderings, plane waves, midpoint, coarse graining


def check_orderings(cfg: RunConfig) -> CheckResult:
    def body():
        rt = all(
            weyl_dequantize(weyl_quantize(n, m)) == PhasePoly.monomial(n, m) for n in range(9) for m in range(9 - n)
        )
        tr = {
            o: all(ordering_transition_check(n, m, o) for n in range(7) for m in range(7 - n))
            for o in ("born-jordan", "standard")
        }
        r = rng(cfg.seed + 12)
        hom = sum(homomorphism_check(random_phasepoly(r, 4), random_phasepoly(r, 4)) for _ in range(50))
        checks = {
            "Weyl round trip n+m <= 8": rt,
            "Born-Jordan transition n+m <= 6": tr["born-jordan"],
            "standard transition n+m <= 6": tr["standard"],
            f"homomorphism {hom}/50": hom == 50,
        }
        ok, detail = _all(checks)
        return ok, None, detail, {}

    return _run("orderings", "c12-orderings", "W(Q0 f Q0 g) = f *0 g; Q_ord(q^n p^m) = Q0(T q^n p^m)", body)


def check_heisenberg_weyl(cfg: RunConfig) -> CheckResult:
    def body():
        u = PlaneWave.make("phi", "xi")
        v = PlaneWave.make("phip", "xip")
        w = PlaneWave.make("eta", "sigma")
        uv = moyal_pw(u, v)
        phase = -I * (S("phi") * S("xip") - S("xi") * S("phip")) / (2 * HBAR)
        checks = {
            "phase": uv.exponent == phase and uv.phi == S("phi") + S("phip") and uv.xi == S("xi") + S("xip"),
            "cocycle associativity": moyal_pw(moyal_pw(u, v), w) == moyal_pw(u, moyal_pw(v, w)),
            "series agreement through order 3": all(
                bidiff_on_plane_waves(bd.moyal_star(2 * k), u, v, 2 * k) == phase_series(commutator_phase(u, v), k + 1)
                for k in range(4)
            ),
        }
        ok, detail = _all(checks)
        return ok, None, detail, {}

    return _run("heisenberg-weyl", "c13-heisenberg-weyl", "e(phi,xi) *0 e(phi',xi') = exp[-i(phi xi' - xi phi')/2hbar] e(phi+phi',xi+xi')", body)


def check_midpoint(cfg: RunConfig, operators: int = 6) -> CheckResult:
    def body():
        exhaustive = all(midpoint_identity_check(m, a, b) for m in range(5) for a in range(5) for b in range(5))
        r = rng(cfg.seed + 14)
        monos = [PhasePoly.monomial(a, b) for a in range(7) for b in range(7 - a)]
        pairs = [(f, g) for f in monos for g in monos if f.degree() + g.degree() <= 6]
        bad = 0
        total = 0
        for _ in range(operators):
            T = random_local_op(r, 4)
            for f, g in pairs:
                total += 1
                if not midpoint_product_check(T, f, g):
                    bad += 1
        checks = {"exhaustive m, a1, a2 <= 4": exhaustive, f"lifted products {total - bad}/{total}": bad == 0}
        ok, detail = _all(checks)
        return ok, None, detail, {}

    return _run("midpoint", "c14-midpoint-lift", "I(1,2) (dq1+dq2)^m q1^a1 q2^a2 = dq^m q^(a1+a2)", body)


def check_coarse_grain(cfg: RunConfig, polys: int = 12) -> CheckResult:
    def body():
        r = rng(cfg.seed + 15)
        worst = 0.0
        bad = 0
        params = [(0.5, 1.0), (1.0, 0.7), (0.3, 1.9), (2.0, 1.3)]
        for k in range(polys):
            f = random_phasepoly(r, 6)
            eta, sigma = params[k % len(params)]
            rep = ne.gaussian_coarse_grain_check(f, eta, sigma, tol=1e-10)
            worst = max(worst, rep.max_residual)
            bad += not rep.passed
        for text in ("1", "q^2", "q*p"):
            from .parsefmt import parse_phasepoly

            rep = ne.gaussian_coarse_grain_check(parse_phasepoly(text), 0.5, 1.0, tol=1e-10)
            worst = max(worst, rep.max_residual)
            bad += not rep.passed
        return bad == 0, worst, f"{polys + 3 - bad}/{polys + 3} polynomials within 1e-10", {}

    return _run("coarse-grain", "c15-coarse-grain", "Gaussian smoothing = exp[(eta/4)(sigma^2 dq^2 + dp^2/sigma^2)]", body)


SUITES = {
    "moyal-core": [check_moyal_associativity, check_sine_bracket, check_moyal_classical_limit],
    "husimi": [check_husimi],
    "damped": [
        check_damped_pathology,
        lambda cfg: check_damped_pathology(cfg, sign=-1),
        check_hermitian_damped,
        check_damped_eom,
    ],
    "no-go": [check_nonassociativity, check_no_go, check_no_augmentation],
    "damped-local": [check_damped_local],
    "orderings": [check_orderings],
    "heisenberg-weyl": [check_heisenberg_weyl],
    "midpoint": [check_midpoint],
    "coarse-grain": [check_coarse_grain],
}


def run_suite(name: str, cfg: RunConfig | None = None) -> list[CheckResult]:
    cfg = cfg or RunConfig()
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    results = [fn(cfg) for n in names for fn in SUITES[n]]
    return sorted(results, key=lambda r: r.check_id)
