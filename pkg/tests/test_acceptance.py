"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a one-line verdict that the conftest prints at the end of
the run; ``python3 tests/test_acceptance.py`` prints the same lines directly.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))
from conftest import ACCEPTANCE, random_positive_fourier  # noqa: E402

from lpminkowski import constructions, energy, lp_ode, obstruction  # noqa: E402
from lpminkowski.errors import PathFailure  # noqa: E402
from lpminkowski.funcspec import parse_function  # noqa: E402
from lpminkowski.periodic import PeriodicFunction, grid  # noqa: E402

ONE = PeriodicFunction.constant(1.0)


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, f"criterion {n}: {detail}"


def first_integral_spread(body, p):
    u, du = body.values(0), body.values(1)
    pot = 2.0 * np.log(u) if p == 0 else (2.0 / p) * u**p
    e = du**2 + u**2 - pot
    return float((e.max() - e.min()) / np.abs(e).max())


# -- 1 --------------------------------------------------------------------------

def test_criterion_01_H_limits():
    bad, worst = [], 0.0
    for p in (-7.0, -2.0, -0.5, 0.0, 0.5, 1.5):
        ctx = energy.EnergyContext(p)
        err_one = abs(energy.H_integral(ctx, 1.0 - 1e-4) - math.pi / math.sqrt(2.0 - p))
        low = math.pi / 2.0 if p <= 0 else math.pi / (2.0 - p)
        err_zero = abs(energy.H_integral(ctx, 1e-4) - low)
        worst = max(worst, err_one, err_zero)
        for side, err in (("m->1", err_one), ("m->0", err_zero)):
            if err > 2e-2:
                bad.append(f"p={p:g} {side} off by {err:.3g}")
    record(1, not bad, "; ".join(bad) if bad else f"max error {worst:.2e} <= 2e-2")


# -- 2 --------------------------------------------------------------------------

def test_criterion_02_exact_families():
    ms = np.round(np.arange(1, 10) / 10.0, 12)
    err1 = max(abs(energy.H_integral(energy.EnergyContext(1.0), m) - math.pi) for m in ms)
    err2 = max(abs(energy.H_integral(energy.EnergyContext(-2.0), m) - math.pi / 2) for m in ms)
    record(2, max(err1, err2) <= 1e-6, f"|H - pi| = {err1:.2e} (p=1), |H - pi/2| = {err2:.2e} (p=-2)")


# -- 3 --------------------------------------------------------------------------

def test_criterion_03_multiplicity():
    p = -8.0
    res = energy.count_solutions(p)
    ctx = energy.EnergyContext(p)
    spec = lp_ode.ProblemSpec(p, ONE)
    worst_res, worst_fi = 0.0, 0.0
    for r in res.roots:
        body = energy.reconstruct_symmetric_solution(ctx, r["m"], r["kappa"])
        worst_res = max(worst_res, float(np.max(np.abs(lp_ode.residual(body.u, spec, body.n).values))))
        worst_fi = max(worst_fi, first_integral_spread(body, p))
    ok = len(res.roots) >= 2 and worst_res <= 1e-6 and worst_fi <= 1e-8
    pairs = ", ".join(f"(kappa={r['kappa']}, m={r['m']:.12f})" for r in res.roots)
    record(3, ok, f"{len(res.roots)} non-constant (kappa, m) pairs [{pairs}] "
                  f"(need >= 2); residual {worst_res:.2e}, first integral {worst_fi:.2e}")


# -- 4 --------------------------------------------------------------------------

def test_criterion_04_uniqueness_window():
    ms = np.linspace(0.01, 0.99, 50)
    bad = []
    for p in (0.5, 0.75, 1.5, 1.9):
        ctx = energy.EnergyContext(p)
        d = np.diff([energy.H_integral(ctx, m) for m in ms])
        monotone = bool(np.all(d > 0) or np.all(d < 0))
        n_roots = len(energy.count_solutions(p).roots)
        if not monotone or n_roots:
            bad.append(f"p={p:g}: monotone={monotone}, roots={n_roots}")
    record(4, not bad, "; ".join(bad) if bad else "H strictly monotone, no non-constant roots")


# -- 5 --------------------------------------------------------------------------

def test_criterion_05_derivative_routes():
    ms = np.linspace(0.1, 0.9, 10)
    worst = 0.0
    for p in (-3.0, -0.5, 0.5, 1.5):
        ctx = energy.EnergyContext(p)
        for m in ms:
            v = [energy.dH_dm(ctx, m, k) for k in energy.DH_METHODS]
            worst = max(worst, (max(v) - min(v)) / abs(v[0]))
    record(5, worst <= 1e-4, f"max relative spread of three routes {worst:.2e} <= 1e-4")


# -- 6 --------------------------------------------------------------------------

def test_criterion_06_kernel_identities():
    rng = np.random.default_rng(6)
    h = 1e-3
    worst = 0.0
    for _ in range(100):
        p = float(rng.uniform(-8.0, 1.9))
        u = float(rng.uniform(0.2, 3.0))
        ctx = energy.EnergyContext(p)
        phi = lambda x: float(ctx.Phi(x))
        # five-point stencil for Phi'
        fd = (phi(u - 2 * h) - 8 * phi(u - h) + 8 * phi(u + h) - phi(u + 2 * h)) / (12 * h)
        ref = -2.0 * float(ctx.K_over_G1_4(u))
        worst = max(worst, abs(fd - ref) / abs(ref))
    at_one = 0.0
    for p in rng.uniform(-10.0, 2.0, 20):
        ctx = energy.EnergyContext(p)
        scale_L = max(abs(3 * p - 4), abs(2 * (2 * p - 1) * (p - 2)), abs((p - 2) * (p - 8)),
                      abs(2 * (2 * p * p - 7 * p + 8)), abs(p * (p - 3)))
        scale_dL = max(abs((3 * p - 4) * (2 * p - 4)), abs(2 * (2 * p - 1) * (p - 2) * (p - 4)),
                       abs(2 * (p - 2) * (p - 8)), abs(2 * (2 * p * p - 7 * p + 8) * (p - 2)))
        scale_T = max(abs(2 * (p - 1) * (3 * p - 4)), abs((p - 2) * (p - 4) * (2 * p - 1)),
                      abs(p * (2 * p * p - 7 * p + 8)))
        K, L, T = energy.kernels(ctx, 1.0)
        at_one = max(at_one, abs(K), abs(L) / scale_L, abs(float(ctx.dL(1.0))) / scale_dL,
                     abs(T) / scale_T)
    ok = worst <= 1e-6 and at_one <= 1e-9
    record(6, ok, f"Phi' vs -2K/(G')^4 relative {worst:.2e} <= 1e-6; scaled |K,L,L',T|(1) {at_one:.2e} <= 1e-9")


# -- 7 --------------------------------------------------------------------------

def test_criterion_07_sign_table():
    table = {1.5: -1, 1.9: -1, -1.5: 1, 0.5: 1, -3.0: -1, -8.0: -1}
    bad = []
    for p, want in table.items():
        ctx = energy.EnergyContext(p)
        got = {k: int(np.sign(energy.dH_dm(ctx, 0.99, k))) for k in energy.DH_METHODS}
        if any(s != want for s in got.values()):
            bad.append(f"p={p:g}: {got}")
    record(7, not bad, "; ".join(bad) if bad else "all three routes give the tabulated signs at m=0.99")


# -- 8 --------------------------------------------------------------------------

def test_criterion_08_obstruction():
    notes, ok = [], True
    f = parse_function("2+cos2t")
    t = grid(4096)
    kf = obstruction.kernel_Kf(f, -2.0)(t)
    err = float(np.max(np.abs(kf + 2.0 * np.sin(2 * t) ** 2)))
    ok &= err <= 1e-10
    notes.append(f"p=-2 kernel error {err:.1e}")
    rep = obstruction.certify_nonexistence(-2.0, f, probes=100, seed=8)
    worst_probe = max(rep.probe_residuals)
    ok &= len(rep.probe_residuals) == 100 and worst_probe < 0
    notes.append(f"max probe identity {worst_probe:.2e} < 0")
    try:
        lp_ode.continuation_solve(-2.0, f)
        ok = False
        notes.append("continuation reached t=1")
    except PathFailure as exc:
        ok &= exc.info["last_t"] < 1.0
        notes.append(f"continuation stopped at t={exc.info['last_t']:.4f}")

    p = -3.0
    f3, expected = obstruction.construct_counterexample(p)
    theta = np.linspace(0.0, 2 * np.pi, 4001)
    dist = np.abs(theta - np.round(theta / (np.pi / 2)) * (np.pi / 2))
    theta = theta[dist > 1e-2]
    err3 = float(np.max(np.abs(obstruction.kernel_Kf(f3, p)(theta) - expected(theta))))
    phi = obstruction.phi_function(p)
    end_err = max(abs(phi(0.0) - (-1.0 / (p + 2))), abs(phi(np.pi / 2) - 1.0 / (p + 2)))
    ok &= err3 <= 1e-6 and end_err <= 1e-6
    notes.append(f"p=-3 kernel error {err3:.1e}, phi endpoint error {end_err:.1e}")
    record(8, ok, "; ".join(notes))


# -- 9 --------------------------------------------------------------------------

@pytest.mark.parametrize("p", [0.5, 1.0])
def test_criterion_09_degeneration(p):
    exact, min_f, ratio, dev = True, math.inf, 0.0, 0.0
    for j in range(10, 101):
        eps = 1.0 / j
        fam = constructions.build_family_member(p, eps)
        body = fam.body()
        exact &= math.isclose(body.u_min, eps ** (2.0 / (2.0 - p)), rel_tol=1e-15, abs_tol=0.0)
        min_f = min(min_f, float(np.min(fam.f.sample(fam.n))))
        ratio = max(ratio, constructions.bound_diagnostics(body, fam.f, p)["width_ratio"])
        rep = constructions.solve_and_compare(fam)
        dev = max(dev, rep.reference_deviation if rep.converged else math.inf)
    ok = exact and min_f >= 0.1 and ratio <= 10 and dev <= 1e-6
    detail = (f"p={p:g}: min u exact={exact}, min f over sweep {min_f:.3f}, "
              f"max w+/w- {ratio:.3f}, Newton deviation {dev:.1e}")
    prev = ACCEPTANCE.get(9)
    if prev is not None:
        ok, detail = ok and prev[0], prev[1] + " | " + detail
    record(9, ok, detail)


# -- 10 -------------------------------------------------------------------------

def test_criterion_10_existence():
    rng = np.random.default_rng(10)
    worst, failures, solved = 0.0, [], 0
    for p in (-0.9, -0.5, 0.0):
        for i in range(20):
            f = random_positive_fourier(rng)
            try:
                rep = lp_ode.continuation_solve(p, f)
                constructions.bound_diagnostics(rep.solution, f, p)
            except Exception as exc:  # any failure counts against the criterion
                failures.append(f"p={p:g}#{i}: {type(exc).__name__}")
                continue
            if not (rep.converged and rep.solution is not None and rep.mass_balance <= 1e-8):
                failures.append(f"p={p:g}#{i}: {rep.status}, identity {rep.mass_balance:.1e}")
                continue
            solved += 1
            worst = max(worst, rep.mass_balance)
    record(10, not failures,
           "; ".join(failures) if failures else f"{solved}/60 solved, convex, bounds hold, identity {worst:.1e}")


# -- 11 -------------------------------------------------------------------------

def test_criterion_11_identity_regression():
    p = -8.0
    ctx = energy.EnergyContext(p)
    res = energy.count_solutions(p)
    worst, checked = 0.0, 0
    for r in res.roots:
        body = energy.reconstruct_symmetric_solution(ctx, r["m"], r["kappa"])
        kf = obstruction.kernel_Kf(ONE, p).sample(body.n)
        scale = float(np.mean(np.abs(kf) * body.values() ** p)) * 2 * np.pi
        worst = max(worst, abs(obstruction.identity_residual(body, ONE, p)) / scale)
        # the solver's own diagnostics on the same samples; Newton cannot polish
        # here because rotations make the f = 1 linearisation singular
        spec = lp_ode.ProblemSpec(p, ONE)
        res_norm = float(np.max(np.abs(lp_ode.residual(body.u, spec, body.n).values)))
        rep = lp_ode.SolveReport(spec=spec, status="converged", u=body.values(),
                              residual_norm=res_norm, iterations=0, history=[res_norm],
                              grid_n=body.n, method="spectral", tol=1e-6)
        lp_ode.solution_diagnostics(rep)
        worst = max(worst, abs(rep.kernel_identity) / scale)
        checked += 1
    ok = checked > 0 and worst <= 1e-6
    record(11, ok, f"{checked} solutions, relative |int K_f u^p| {worst:.1e} <= 1e-6")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        args = [[0.5], [1.0]] if fn.__name__.endswith("degeneration") else [[]]
        for a in args:
            try:
                fn(*a)
            except AssertionError:
                pass
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
