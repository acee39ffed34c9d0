"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line.

Exact criteria compare canonical exact objects with ``==``.  Where cheap, an
independent sympy route (tests/conftest.py) double-checks the engine.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from phasestar import bidiff as bd
from phasestar import numeval as ne
from phasestar.expsym import PlaneWave, moyal_pw
from phasestar.localtrans import (
    ansatz_augmentation,
    augmentation,
    damped_theta,
    midpoint_identity_check,
    midpoint_product_check,
    sho_expr,
)
from phasestar.ordering import homomorphism_check, ordering_transition_check, weyl_dequantize, weyl_quantize
from phasestar.phasepoly import PhasePoly, sho_hamiltonian
from phasestar.sampling import random_local_op, random_phasepoly, random_transition, rng
from phasestar.scalars import HBAR, I, S
from phasestar.transition import damped_eta, hbar_zero_part, husimi, odot, star_T
from phasestar.verify import find_nonassociativity_witness

from conftest import antidamped_gen, damped_gen, hbar as h_, moyal_gen, oracle_exprs, oracle_star, sym_equal, to_sympy

SEED = 20240611


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def report(capsys, cid, ok, clock, bound, detail=""):
    within = clock.elapsed < bound
    status = "PASS" if ok and within else "FAIL"
    with capsys.disabled():
        print(f"\n{status} {cid}: {detail} [{clock.elapsed:.2f} s, bound {bound} s]")
    assert ok, detail
    assert within, f"took {clock.elapsed:.2f} s > {bound} s"


def test_c01_moyal_associativity(capsys):
    r = rng(SEED + 1)
    bad = 0
    with Clock() as c:
        star = bd.moyal_star(15)
        for _ in range(100):
            f, g, h = (random_phasepoly(r, 5, -9, 9) for _ in range(3))
            if star.apply(star.apply(f, g), h) != star.apply(f, star.apply(g, h)):
                bad += 1
    # one product cross-checked against direct differentiation
    f, g = random_phasepoly(r, 3), random_phasepoly(r, 3)
    oracle_ok = sym_equal(to_sympy(star.apply(f, g)), oracle_star(f, g, moyal_gen, 6))
    report(capsys, "c01-moyal-associativity", bad == 0 and oracle_ok, c, 60,
           f"{100 - bad}/100 triples associative, oracle product agrees: {oracle_ok}")


def test_c02_sine_bracket(capsys):
    lq, lp, rq, rp, x = sp.symbols("lq lp rq rp x")
    with Clock() as c:
        M0 = bd.moyal_bracket_op(bd.moyal_star(7))
        series = sp.series(2 * sp.sin(h_ * x / 2) / h_, x, 0, 8).removeO()
        expected = sp.Poly(sp.expand(series.subs(x, lq * rp - lp * rq)), lq, lp, rq, rp)
        want = {k: v for k, v in zip(expected.monoms(), expected.coeffs()) if sum(k) <= 7}
        got = {k: to_sympy(v) for k, v in M0.terms.items()}
        ok = set(want) == set(got) and all(sym_equal(want[k], got[k]) for k in want)
    report(capsys, "c02-sine-bracket", ok, c, 5, f"{len(got)} coefficients through order 7")


def test_c03_moyal_classical_limit(capsys):
    with Clock() as c:
        lim = bd.moyal_bracket_op(bd.moyal_star(10)).classical_limit()
        ok = lim == bd.poisson_op() and lim.terms == {(1, 0, 0, 1): S(1), (0, 1, 1, 0): S(-1)}
    report(capsys, "c03-moyal-classical-limit", ok, c, 1, f"limit = {lim}")


def test_c04_husimi(capsys):
    D = 8
    with Clock() as c:
        od = odot(husimi(order=D), D)
        M0 = bd.moyal_bracket_op(bd.moyal_star(D))
        Meta = bd.moyal_bracket_op(star_T(husimi(order=D), D))
        P = bd.poisson_op()
        checks = {
            "M_eta = M0 odot": Meta == (M0 * od).truncate(D),
            "odot^t = odot": od.transpose() == od,
            "lim M_eta = P odot": Meta.classical_limit() == (P * od).truncate(D),
        }
    report(capsys, "c04-husimi", all(checks.values()), c, 10, str(checks))


def _reality(sign):
    D = 10
    H = sho_hamiltonian()
    sg = bd.damped_star(order=D)
    Mg, M0 = bd.moyal_bracket_op(sg), bd.moyal_bracket_op(bd.moyal_star(D))
    adj = bd.moyal_star(D) * bd.exp_series((bd.LP * bd.RP).scale(I * HBAR * S("gamma") * S("m")), D)
    r = rng(SEED + 5)
    hits = 0
    for _ in range(50):
        f = random_phasepoly(r, 5)
        rhs = f.derivative(1, 1).scale(sign * I * S("gamma") * HBAR)
        hits += Mg.apply(f, H) - M0.apply(f, H) == rhs
    checks = {
        "adjoint = *0 exp(+i hbar gamma m lp rp)": sg.adjoint() == adj,
        "adjoint != *_gamma": sg.adjoint() != sg,
        "lim M_gamma = P": Mg.classical_limit() == bd.poisson_op(),
        f"reality identity {hits}/50": hits == 50,
    }
    return checks


@pytest.mark.xfail(strict=True, reason=(
    "with M = (* - *^t)/(i hbar) and *_gamma = *0 exp(-i hbar gamma m lp rp) the cross term gives "
    "f M_gamma H - f M0 H = -i gamma hbar dq dp f; the +i form holds for H M_gamma f. "
    "Also confirmed by direct differentiation in test_c05_reality_sign_by_direct_differentiation."))
def test_c05_damped_pathology(capsys):
    with Clock() as c:
        checks = _reality(+1)
    report(capsys, "c05-damped-pathology (stated +i gamma hbar form)", all(checks.values()), c, 10, str(checks))


def test_c05_damped_pathology_opposite_sign(capsys):
    with Clock() as c:
        checks = _reality(-1)
    report(capsys, "c05-damped-pathology (-i gamma hbar form)", all(checks.values()), c, 10, str(checks))


def test_c05_reality_sign_by_direct_differentiation(capsys):
    q, p = sp.symbols("q p")
    gamma = sp.Symbol("gamma")
    H = sho_hamiltonian()
    r = rng(SEED + 55)
    signs = set()
    with Clock() as c:
        for _ in range(3):
            f = random_phasepoly(r, 3)
            fs = to_sympy(f)

            def bracket(gen, a, b):
                return (oracle_star(a, b, gen, 8) - oracle_star(b, a, gen, 8)) / (sp.I * h_)

            diff = sp.expand(bracket(damped_gen, f, H) - bracket(moyal_gen, f, H))
            target = sp.I * gamma * h_ * sp.diff(fs, q, p)
            if target == 0:
                continue
            signs |= {s for s in (+1, -1) if sym_equal(diff, s * target)}
    report(capsys, "c05-reality-sign-oracle", signs == {-1}, c, 30, f"signs consistent with oracle: {signs}")


def test_c06_hermitian_damped(capsys):
    D = 8
    with Clock() as c:
        st = star_T(damped_eta(order=D), D)
        target = (bd.poisson_op() * bd.exp_series(
            (bd.LP * bd.RP).scale(-2 * S("eta") * S("gamma") * S("m")), D)).truncate(D)
        checks = {
            "adjoint = itself": st.adjoint() == st,
            "lim M = P exp(-2 eta gamma m lp rp)": bd.moyal_bracket_op(st).classical_limit() == target,
        }
    report(capsys, "c06-hermitian-damped", all(checks.values()), c, 10, str(checks))


def test_c07_nonassociativity_witness(capsys):
    with Clock() as c:
        witness, tried = find_nonassociativity_witness(SEED + 7, max_degree=3)
        assert witness is not None
        a, b, cc = witness
        sp_, sm = bd.damped_star(S("gamma"), order=9), bd.damped_star(-S("gamma"), order=9)
        differs = sm.apply(sp_.apply(a, b), cc) != sp_.apply(a, sm.apply(b, cc))
    # re-verify with direct differentiation
    lhs = oracle_exprs(oracle_star(a, b, damped_gen, 9), to_sympy(cc), antidamped_gen, 9)
    rhs = oracle_exprs(to_sympy(a), oracle_star(b, cc, antidamped_gen, 9), damped_gen, 9)
    oracle_differs = not sym_equal(lhs, rhs)
    report(capsys, "c07-nonassociativity-witness", differs and oracle_differs, c, 30,
           f"after {tried} triples: a = {a}; b = {b}; c = {cc}")


def _population():
    r = rng(SEED + 8)
    return [(k % 2 == 0, random_transition(r, 4, t0_one=(k % 2 == 0))) for k in range(25)]


def test_c08_no_go_theorem(capsys):
    D = 8
    bad = 0
    with Clock() as c:
        pop = _population()
        for _, T in pop:
            T = T.truncate(D)
            lim = bd.moyal_bracket_op(star_T(T, D)).classical_limit()
            want = (bd.poisson_op() * odot(hbar_zero_part(T), D)).truncate(D)
            bad += lim != want
    n_one = sum(t for t, _ in pop)
    ok = bad == 0 and 0 < n_one < 25 and all(T.is_real() for _, T in pop)
    report(capsys, "c08-no-go-theorem", ok, c, 60, f"{25 - bad}/25 operators, {n_one} with T0 = 1, order {D}")


def test_c09_no_augmentation(capsys):
    D = 8
    bad = n = 0
    with Clock() as c:
        for t0_one, T in _population():
            if not t0_one:
                continue
            n += 1
            assert hbar_zero_part(T) == type(T).identity()
            bad += bd.moyal_bracket_op(star_T(T.truncate(D), D)).classical_limit() != bd.poisson_op()
    report(capsys, "c09-no-augmentation", bad == 0 and n > 0, c, 60, f"{n - bad}/{n} give exactly P")


def test_c10_damped_eom(capsys):
    with Clock() as c:
        Pg = bd.damped_poisson()
        H = sho_hamiltonian()
        m, w, g = S("m"), S("omega"), S("gamma")
        qdot = Pg.apply(PhasePoly.q(), H)
        pdot = Pg.apply(PhasePoly.p(), H)
        ok = qdot == PhasePoly.p() / m and pdot == PhasePoly.q().scale(-m * w * w) - PhasePoly.p().scale(2 * g)
    report(capsys, "c10-damped-eom", ok, c, 1, f"qdot = {qdot}; pdot = {pdot}")


def test_c11_local_damped_oscillator(capsys):
    gamma = Fraction(1, 100)
    g = float(gamma)
    with Clock() as c:
        th = damped_theta(1, 1, gamma)
        H = sho_expr(1, 1)
        q, p = ne.sample_points(1000, SEED, box=2.0, p_floor=0.1)
        assert np.all(np.abs(p) >= 0.1) and np.all(np.abs(q) <= 2) and np.all(np.abs(p) <= 2)
        vals = {}
        for name, route in (("general", augmentation), ("ansatz", ansatz_augmentation)):
            Aq, bq = route(th, H, "q").evaluate(q, p)
            Ap, bp = route(th, H, "p").evaluate(q, p)
            assert not (bq.any() or bp.any())
            vals[name] = (Aq, Ap)
        res = {}
        for name, (Aq, Ap) in vals.items():
            res[name + " q"] = float(np.max(np.abs(Aq)))
            res[name + " p"] = float(np.max(np.abs(Ap + 2 * g * p) / np.maximum(1.0, np.abs(p))))
        agree = max(float(np.max(np.abs(vals["general"][k] - vals["ansatz"][k]))) for k in (0, 1))
        ok = all(v <= 1e-9 for v in res.values()) and agree <= 1e-10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in res.items()) + f", routes agree to {agree:.1e}"
    report(capsys, "c11-local-damped-oscillator", ok, c, 30, detail)


def test_c12_orderings(capsys):
    with Clock() as c:
        rt = all(weyl_dequantize(weyl_quantize(n, m)) == PhasePoly.monomial(n, m)
                 for n in range(9) for m in range(9 - n))
        tr = {o: all(ordering_transition_check(n, m, o) for n in range(7) for m in range(7 - n))
              for o in ("born-jordan", "standard")}
        r = rng(SEED + 12)
        hom = sum(homomorphism_check(random_phasepoly(r, 4), random_phasepoly(r, 4)) for _ in range(50))
        ok = rt and all(tr.values()) and hom == 50
    report(capsys, "c12-orderings", ok, c, 60, f"round trip {rt}, transitions {tr}, homomorphism {hom}/50")


def test_c13_heisenberg_weyl(capsys):
    with Clock() as c:
        u, v, w = PlaneWave.make("phi", "xi"), PlaneWave.make("phip", "xip"), PlaneWave.make("eta", "sigma")
        uv = moyal_pw(u, v)
        phase = -I * (S("phi") * S("xip") - S("xi") * S("phip")) / (2 * HBAR)
        ok = (uv.exponent == phase and uv.phi == S("phi") + S("phip") and uv.xi == S("xi") + S("xip")
              and moyal_pw(moyal_pw(u, v), w) == moyal_pw(u, moyal_pw(v, w)))
    report(capsys, "c13-heisenberg-weyl", ok, c, 1, str(uv))


def test_c14_midpoint_lift(capsys):
    with Clock() as c:
        exhaustive = all(midpoint_identity_check(m, a, b) for m in range(5) for a in range(5) for b in range(5))
        monos = [PhasePoly.monomial(a, b) for a in range(7) for b in range(7 - a)]
        pairs = [(f, g) for f in monos for g in monos if f.degree() + g.degree() <= 6]
        r = rng(SEED + 14)
        bad = total = 0
        for _ in range(4):
            T = random_local_op(r, 4)
            assert T.max_order() <= 4
            for f, g in pairs:
                total += 1
                bad += not midpoint_product_check(T, f, g)
    report(capsys, "c14-midpoint-lift", exhaustive and bad == 0, c, 10,
           f"exhaustive m,a1,a2 <= 4: {exhaustive}; lifted products {total - bad}/{total}")


def test_c15_coarse_grain(capsys):
    r = rng(SEED + 15)
    worst = 0.0
    bad = 0
    with Clock() as c:
        for k, (eta, sigma) in enumerate([(0.5, 1.0), (1.0, 0.7), (0.3, 1.9), (2.0, 1.3)] * 3):
            f = random_phasepoly(r, 6)
            rep = ne.gaussian_coarse_grain_check(f, eta, sigma, tol=1e-10)
            worst = max(worst, rep.max_residual)
            bad += not rep.passed
    report(capsys, "c15-coarse-grain", bad == 0, c, 10, f"12 polynomials, worst residual {worst:.1e}")
