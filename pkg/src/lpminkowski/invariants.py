"""Invariant checks driven by a stored fixture file.

Each fixture entry names a ``kind`` and its parameters; the matching checker
recomputes the quantity and compares it with the stored expectation.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from . import constructions, energy, lp_ode, obstruction
from .errors import LpMinkowskiError
from .funcspec import parse_function
from .support_geometry import SupportBody, arc_inequality_check
from .periodic import PeriodicFunction, grid

__all__ = ["load_fixtures", "run_suite", "CHECKS"]


def load_fixtures(path=None):
    """Fixture list from ``path`` or the copy shipped with the package."""
    if path is None:
        text = resources.files("lpminkowski").joinpath("data/fixtures.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)["checks"]


def _check_H(fx):
    ctx = energy.EnergyContext(fx["p"])
    got = [energy.H_integral(ctx, m) for m in fx["m"]]
    err = max(abs(g - e) for g, e in zip(got, fx["expected"]))
    return err <= fx["tol"], {"max_error": err}


def _check_conjugate_max(fx):
    M = energy.conjugate_max(energy.EnergyContext(fx["p"]), fx["m"])
    err = abs(M - fx["expected"])
    return err <= fx["tol"], {"M": M, "error": err}


def _check_count(fx):
    res = energy.count_solutions(fx["p"], m_grid_size=fx.get("grid", 400))
    ok = res.count == fx["expected_count"] and len(res.roots) == len(fx["expected_roots"])
    errs = []
    for got, want in zip(res.roots, fx["expected_roots"]):
        ok &= got["kappa"] == want["kappa"]
        errs.append(abs(got["m"] - want["m"]))
    ok &= all(e <= fx["tol"] for e in errs)
    return ok, {"count": res.count, "root_m_errors": errs}


def _check_kernel(fx):
    n = fx.get("n", 256)
    kf = obstruction.kernel_Kf(parse_function(fx["f"]), fx["p"]).sample(n)
    want = parse_function(fx["expected"]).sample(n)
    err = float(np.max(np.abs(kf - want)))
    return err <= fx["tol"], {"max_error": err}


def _check_solve(fx):
    rep = lp_ode.continuation_solve(fx["p"], parse_function(fx["f"]), n=fx.get("n", 256))
    errs = (abs(float(np.min(rep.u)) - fx["expected_u_min"]),
            abs(float(np.max(rep.u)) - fx["expected_u_max"]))
    ok = rep.converged and max(errs) <= fx["tol"] and rep.mass_balance <= 1e-8
    return ok, {"status": rep.status, "u_errors": list(errs), "mass_balance": rep.mass_balance}


def _check_obstruct(fx):
    rep = obstruction.certify_nonexistence(fx["p"], parse_function(fx["f"]),
                                           probes=fx["probes"], seed=fx["seed"])
    return rep.certified == fx["expected_certified"], {"certified": rep.certified,
                                                       "Kf_max": rep.kf_max}


def _check_family(fx):
    fam = constructions.build_family_member(fx["p"], fx["eps"])
    body = fam.body()
    rep = constructions.solve_and_compare(fam)
    ok = (math.isclose(body.u_min, fx["expected_u_min"], rel_tol=1e-15)
          and rep.converged and rep.reference_deviation <= 1e-6)
    return ok, {"u_min": body.u_min, "reference_deviation": rep.reference_deviation}


def _check_reconstruct(fx):
    ctx = energy.EnergyContext(fx["p"])
    body = energy.reconstruct_symmetric_solution(ctx, fx["m"], fx["kappa"])
    spec = lp_ode.ProblemSpec(fx["p"], PeriodicFunction.constant(1.0))
    res = float(np.max(np.abs(lp_ode.residual(body.u, spec, body.n).values)))
    errs = (abs(body.u_min - fx["expected_u_min"]), abs(body.u_max - fx["expected_u_max"]))
    ok = res <= fx["max_residual"] and max(errs) <= fx["tol"]
    return ok, {"residual": res, "extreme_errors": list(errs)}


def _check_kernel_scan(fx):
    scan = energy.prop83_kernel_scan(energy.EnergyContext(fx["p"]), fx["m"])
    return scan["sign_constant"] == fx["expected_sign_constant"], {
        "min": scan["min"], "max": scan["max"]}


def _check_dH_agreement(fx):
    ctx = energy.EnergyContext(fx["p"])
    worst = 0.0
    for m in fx["m"]:
        vals = [energy.dH_dm(ctx, m, meth) for meth in energy.DH_METHODS]
        worst = max(worst, (max(vals) - min(vals)) / abs(vals[0]))
    return worst <= fx["rtol"], {"max_relative_spread": worst}


def _check_kernels_at_one(fx):
    worst = 0.0
    for p in fx["p"]:
        K, L, T = energy.kernels(energy.EnergyContext(p), np.array([1.0]))
        worst = max(worst, float(np.max(np.abs([K, L, T]))))
    return worst <= fx["tol"], {"max_abs": worst}


def _check_arc_inequalities(fx):
    u = parse_function(fx["u"])
    p = fx["p"]
    body = SupportBody(u, fx.get("n", 256))
    t = grid(body.n)
    f = PeriodicFunction.from_samples((u(t, 2) + u(t)) * u(t) ** (1.0 - p))
    rep = arc_inequality_check(body, f, p)
    return rep["consistent"], {"worst_slack": rep["worst_slack"]}


CHECKS = {
    "H": _check_H,
    "conjugate_max": _check_conjugate_max,
    "count": _check_count,
    "kernel": _check_kernel,
    "solve": _check_solve,
    "obstruct": _check_obstruct,
    "family": _check_family,
    "reconstruct": _check_reconstruct,
    "kernel_scan": _check_kernel_scan,
    "dH_agreement": _check_dH_agreement,
    "kernels_at_one": _check_kernels_at_one,
    "arc_inequalities": _check_arc_inequalities,
}


def run_suite(fixtures, map_fn=map):
    """Run every fixture; returns one result dict per entry, in order.

    A checker that raises counts as a failure and records the message.
    """

    def run(fx):
        try:
            ok, detail = CHECKS[fx["kind"]](fx)
        except (LpMinkowskiError, KeyError, ValueError) as exc:
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        return {"name": fx["name"], "kind": fx["kind"], "passed": bool(ok), "detail": detail}

    return list(map_fn(run, fixtures))
