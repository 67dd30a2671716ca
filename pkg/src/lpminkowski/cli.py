"""Command-line entry point ``lpminkowski``.

Every subcommand writes its results into ``--out`` (default: the current
directory) and embeds ``{p, grid_n, tol, seed, version}`` in each file.

Exit codes: 0 success, 1 usage or input error, 2 numerical or domain
failure, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, constructions, energy, invariants, lp_ode, obstruction
from .errors import BoundViolation, DomainError, LpMinkowskiError
from .formats import write_csv, write_json
from .funcspec import describe, parse_function
from .periodic import DEFAULT_N, PeriodicFunction, check_grid_size
from .svg import line_plot, write_svg

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_INVARIANT = 0, 1, 2, 3
THREADS_ENV = "MINKOWSKI_THREADS"


@dataclass
class RunConfig:
    """Parsed command line shared by all subcommands."""

    subcommand: str
    p: float | None = None
    f: str | None = None
    grid_n: int = DEFAULT_N
    tol: float = 1e-10
    out: Path = Path(".")
    seed: int = 0
    svg: bool = False
    extra: dict = field(default_factory=dict)

    def meta(self, **overrides):
        m = {"p": self.p, "grid_n": self.grid_n, "tol": self.tol, "seed": self.seed,
             "version": __version__}
        m.update(overrides)
        return m


def thread_count():
    """Worker count from ``MINKOWSKI_THREADS`` (default: CPU count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        k = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return k


@contextmanager
def parallel_map():
    """Order-preserving map over a thread pool (plain ``map`` for one thread)."""
    k = thread_count()
    if k == 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=k) as pool:
        yield pool.map


def _out(cfg, name):
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out / name


# -- subcommands -----------------------------------------------------------------

def cmd_solve(cfg):
    f = parse_function(cfg.f or "const:1")
    mode = cfg.extra["mode"]
    if mode == "auto":
        mode = "newton" if cfg.p == 1.0 else "continuation"
    meta = cfg.meta(f=describe(f), mode=mode)
    try:
        if mode == "continuation":
            rep = lp_ode.continuation_solve(cfg.p, f, cfg.extra["steps"], n=cfg.grid_n,
                                         tol=cfg.tol, method=cfg.extra["method"])
        else:
            init = parse_function(cfg.extra["init"] or "const:1")
            rep = lp_ode.newton_solve(lp_ode.ProblemSpec(cfg.p, f), init, cfg.tol, n=cfg.grid_n,
                                   method=cfg.extra["method"], degenerate="lstsq")
    except DomainError:
        raise
    except LpMinkowskiError as exc:
        info = getattr(exc, "info", {})
        write_json(_out(cfg, "solve_report.json"), {
            "meta": meta, "status": "failed", "error": type(exc).__name__, "message": str(exc),
            "t_reached": info.get("last_t"), "history": [float(r) for r in info.get("history", [])]})
        print(f"solve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    body = PeriodicFunction.from_samples(rep.u)
    n = rep.grid_n
    res = lp_ode.residual(body, rep.spec, n).values
    rows = zip(rep.theta, rep.u, body.sample(n, 1), body.sample(n, 2), res)
    write_csv(_out(cfg, "solution.csv"), ("theta", "u", "du", "d2u", "residual"), rows, meta)
    write_json(_out(cfg, "solve_report.json"), {"meta": meta, **rep.to_dict()})
    if cfg.svg:
        write_svg(_out(cfg, "solution.svg"), line_plot(
            [(rep.theta, rep.u, "u"), (rep.theta, rep.spec.f.sample(n), "f")],
            title=f"solution for p = {cfg.p:g}", xlabel="theta", ylabel="value"))
    print(f"solve: {rep.status}, residual {rep.residual_norm:.3e}, "
          f"mass balance {rep.mass_balance:.3e}, min u {np.min(rep.u):.6g}")
    return EXIT_OK if rep.converged else EXIT_FAILURE


def cmd_count(cfg, pmap):
    res = energy.count_solutions(cfg.p, m_grid_size=cfg.extra["grid"], map_fn=pmap)
    write_json(_out(cfg, "count.json"), {"meta": cfg.meta(), **res.to_dict()})
    if cfg.svg:
        _H_plot(cfg, res.m_grid, res.H_grid, "count.svg")
    print(f"count: p = {cfg.p:g}, {len(res.roots)} non-constant "
          f"pair(s), count {res.count}")
    return EXIT_OK


def _H_plot(cfg, m, H, name):
    lo, hi = energy.H_limits(cfg.p)
    levels = [(math.pi / k, f"pi/{k}") for k in range(1, math.ceil(math.sqrt(2 - cfg.p)) + 2)
              if min(lo, hi) - 0.5 <= math.pi / k <= max(lo, hi) + 0.5]
    write_svg(_out(cfg, name), line_plot([(m, H, "H(m)")], hlines=levels,
                                         title=f"period integral, p = {cfg.p:g}",
                                         xlabel="m", ylabel="H"))


def cmd_energy_profile(cfg, pmap):
    pts = cfg.extra["points"]
    m = np.linspace(cfg.extra["m_min"], cfg.extra["m_max"], pts)
    prof = energy.energy_profile(cfg.p, m, map_fn=pmap)
    write_csv(_out(cfg, "energy_profile.csv"), energy.PROFILE_COLUMNS, prof.rows, cfg.meta())
    if cfg.svg:
        _H_plot(cfg, prof.column("m"), prof.column("H"), "energy_profile.svg")
    H = prof.column("H")
    print(f"energy-profile: {len(prof.rows)} rows, H in [{H.min():.12g}, {H.max():.12g}]")
    return EXIT_OK


def cmd_kernel_scan(cfg):
    scan = energy.prop83_kernel_scan(energy.EnergyContext(cfg.p), cfg.extra["m"],
                                     samples=cfg.extra["samples"])
    write_json(_out(cfg, "kernel_scan.json"), {"meta": cfg.meta(m=cfg.extra["m"]), **scan})
    print(f"kernel-scan: min {scan['min']:.6g}, max {scan['max']:.6g}, "
          f"sign constant {scan['sign_constant']}")
    return EXIT_OK


def cmd_obstruct(cfg, pmap):
    if cfg.f is None:
        f, _ = obstruction.construct_counterexample(cfg.p)
    else:
        f = parse_function(cfg.f)
    rep = obstruction.certify_nonexistence(cfg.p, f, cfg.extra["probes"], seed=cfg.seed,
                                           n=cfg.grid_n, map_fn=pmap)
    write_json(_out(cfg, "obstruct.json"), {"meta": cfg.meta(f=describe(f)), **rep.to_dict()})
    print(f"obstruct: certified={str(rep.certified).lower()}, max K_f {rep.kf_max:.3e}, "
          f"worst probe residual {max(rep.probe_residuals, default=float('nan')):.3e}")
    return EXIT_OK if rep.certified else EXIT_INVARIANT


def _eps_values(cfg):
    sweep = cfg.extra["eps_sweep"]
    if sweep is None:
        return [cfg.extra["eps"]]
    try:
        j0, j1 = (int(v) for v in sweep.split(".."))
    except ValueError:
        raise DomainError(f"--eps-sweep expects j0..j1, got {sweep!r}") from None
    if not 0 < j0 <= j1:
        raise DomainError(f"--eps-sweep needs 0 < j0 <= j1, got {sweep!r}")
    return [1.0 / j for j in range(j0, j1 + 1)]


def cmd_construct(cfg, pmap):
    eps = _eps_values(cfg)
    rows = constructions.family_sweep(cfg.p, eps, map_fn=pmap)
    cols = ("eps", "min_u", "min_f", "max_f", "w_minus", "w_plus")
    write_csv(_out(cfg, "construct.csv"), cols, rows, cfg.meta(grid_n=None))
    if cfg.svg:
        fam = constructions.build_family_member(cfg.p, eps[-1])
        t = np.linspace(0.0, 2 * np.pi, 2001)
        write_svg(_out(cfg, "construct.svg"), line_plot(
            [(t, fam.u(t), "u"), (t, fam.f(t), "f")],
            title=f"family member p = {cfg.p:g}, eps = {eps[-1]:.4g}",
            xlabel="theta", ylabel="value"))
    ratio = max(r[5] / r[4] for r in rows)
    print(f"construct: {len(rows)} member(s), min u down to {min(r[1] for r in rows):.3e}, "
          f"min f {min(r[2] for r in rows):.4g}, max width ratio {ratio:.4g}")
    return EXIT_OK


def cmd_verify(cfg, pmap):
    fixtures = invariants.load_fixtures(cfg.extra["fixtures"])
    results = invariants.run_suite(fixtures, map_fn=pmap)
    write_json(_out(cfg, "verify.json"), {"meta": cfg.meta(p=None), "results": results})
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}")
    failed = sum(not r["passed"] for r in results)
    print(f"verify: {len(results) - failed}/{len(results)} passed")
    return EXIT_OK if failed == 0 else EXIT_INVARIANT


# -- argument parsing -------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="lpminkowski",
                                     description="Planar L_p-Minkowski equation tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, p=True, f=False, n=True):
        if p:
            sp.add_argument("--p", type=float, required=True, help="exponent p")
        if f:
            sp.add_argument("--f", help="right-hand side (const:c, fourier:..., 2+cos2t, JSON or file)")
        if n:
            sp.add_argument("--n", type=int, default=DEFAULT_N, help="grid size (even, >= 16)")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--svg", action="store_true", help="also write an SVG plot")

    sp = sub.add_parser("solve", help="solve u'' + u = f u^(p-1)")
    common(sp, f=True)
    sp.add_argument("--mode", choices=("auto", "continuation", "newton"), default="auto")
    sp.add_argument("--init", help="starting guess for --mode newton")
    sp.add_argument("--steps", type=int, default=lp_ode.DEFAULT_STEPS)
    sp.add_argument("--method", choices=("spectral", "fd2", "fd4"), default="spectral")

    sp = sub.add_parser("count", help="count symmetric solutions for f = 1")
    common(sp, n=False)
    sp.add_argument("--grid", type=int, default=400, help="m-grid size")

    sp = sub.add_parser("energy-profile", help="tabulate H(m) and its derivative")
    common(sp, n=False)
    sp.add_argument("--points", type=int, default=19)
    sp.add_argument("--m-min", type=float, default=0.05)
    sp.add_argument("--m-max", type=float, default=0.95)

    sp = sub.add_parser("kernel-scan", help="scan the derivative kernel over level sets")
    common(sp, n=False)
    sp.add_argument("--m", type=float, default=0.5)
    sp.add_argument("--samples", type=int, default=200)

    sp = sub.add_parser("obstruct", help="certify non-existence for p <= -2")
    common(sp, f=True)
    sp.add_argument("--probes", type=int, default=100)

    sp = sub.add_parser("construct", help="degenerating family for 0 < p < 2")
    common(sp, n=False)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--eps", type=float, default=0.01)
    g.add_argument("--eps-sweep", help="j0..j1 for eps = 1/j")

    sp = sub.add_parser("verify", help="run the invariant suite against fixtures")
    common(sp, p=False, n=False)
    sp.add_argument("--fixtures", type=Path, default=None)
    return parser


def config_from_args(ns):
    extra = {k: v for k, v in vars(ns).items()
             if k not in ("subcommand", "p", "f", "n", "tol", "seed", "out", "svg")}
    n = getattr(ns, "n", None)
    cfg = RunConfig(subcommand=ns.subcommand, p=getattr(ns, "p", None), f=getattr(ns, "f", None),
                    grid_n=check_grid_size(n) if n is not None else None, tol=ns.tol,
                    out=ns.out, seed=ns.seed, svg=ns.svg, extra=extra)
    if cfg.p is not None and not math.isfinite(cfg.p):
        raise DomainError(f"p must be finite, got {cfg.p}")
    return cfg


_COMMANDS = {
    "solve": lambda cfg, pmap: cmd_solve(cfg),
    "count": cmd_count,
    "energy-profile": cmd_energy_profile,
    "kernel-scan": lambda cfg, pmap: cmd_kernel_scan(cfg),
    "obstruct": cmd_obstruct,
    "construct": cmd_construct,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(ns)
        with parallel_map() as pmap:
            return _COMMANDS[cfg.subcommand](cfg, pmap)
    except BoundViolation as exc:
        print(f"{cfg.subcommand}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DomainError as exc:
        print(f"{ns.subcommand}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LpMinkowskiError as exc:
        print(f"{ns.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
