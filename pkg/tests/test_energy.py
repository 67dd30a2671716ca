import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpminkowski import energy
from lpminkowski.errors import CompatibilityError, DomainError, QuadratureFailure

exponents = st.floats(-12.0, 1.95).filter(lambda p: abs(p) > 1e-3 or p == 0.0)


def test_context_rejects_p_at_least_two():
    for p in (2.0, 3.0, float("inf")):
        with pytest.raises(DomainError):
            energy.EnergyContext(p)


@settings(max_examples=40, deadline=None)
@given(exponents, st.floats(0.01, 0.99))
def test_conjugate_max_equalises_F(p, m):
    ctx = energy.EnergyContext(p)
    M = energy.conjugate_max(ctx, m)
    assert M > 1
    Fm = float(ctx.F(m))
    assert float(ctx.F(M)) == pytest.approx(Fm, rel=1e-12, abs=1e-12)


def test_conjugate_max_closed_forms():
    # F = u^2 - 2u is symmetric about 1; F = u^2 + u^-2 is symmetric under u -> 1/u
    assert energy.conjugate_max(1.0, 0.3) == pytest.approx(1.7, abs=1e-14)
    assert energy.conjugate_max(-2.0, 0.25) == pytest.approx(4.0, rel=1e-14)


@pytest.mark.parametrize("p", [-3.0, 0.0, 0.5, 1.5])
def test_dM_dm_matches_central_difference(p):
    ctx = energy.EnergyContext(p)
    m, h = 0.4, 1e-6
    fd = (energy.conjugate_max(ctx, m + h) - energy.conjugate_max(ctx, m - h)) / (2 * h)
    assert energy.dM_dm(ctx, m) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("name", ["K_over_G1_4", "boundary_ratio", "Phi"])
@pytest.mark.parametrize("p", [-8.0, -0.5, 0.0, 0.5, 1.5])
def test_series_patch_is_continuous(name, p):
    ctx = energy.EnergyContext(p)
    fn = getattr(ctx, name)
    w = energy.SERIES_WINDOW
    for sign in (-1.0, 1.0):
        inside = fn(1.0 + sign * w * (1 - 1e-9))
        outside = fn(1.0 + sign * w * (1 + 1e-9))
        assert inside == pytest.approx(outside, rel=1e-8, abs=1e-14)


def test_H_exact_families_and_limits():
    assert energy.H_integral(1.0, 0.37) == pytest.approx(math.pi, abs=1e-12)
    assert energy.H_integral(-2.0, 0.37) == pytest.approx(math.pi / 2, abs=1e-12)
    lo, hi = energy.H_limits(0.5)
    assert (lo, hi) == pytest.approx((math.pi / 1.5, math.pi / math.sqrt(1.5)))


def test_H_rejects_m_outside_unit_interval():
    for m in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            energy.H_integral(0.5, m)


def test_dH_integral_routes_need_room_below_one():
    with pytest.raises(DomainError):
        energy.dH_dm(0.5, 0.9995, "kernel_8_11")
    with pytest.raises(DomainError):
        energy.dH_dm(0.5, 0.5, "simpson")


def test_kernel_route_refuses_cancelled_sum():
    # for p << -2 and small m the kernel integrand changes sign and its pieces cancel
    with pytest.raises(QuadratureFailure):
        energy.dH_dm(-8.0, 0.05, "kernel_8_11")
    fd = energy.dH_dm(-8.0, 0.05, "finite_difference")
    bd = energy.dH_dm(-8.0, 0.05, "boundary_8_12")
    assert bd == pytest.approx(fd, rel=1e-4)


@pytest.mark.parametrize("p", [-0.5, 0.5, 1.5])
def test_kernels_vanish_at_one(p):
    assert np.max(np.abs(energy.kernels(p, 1.0))) < 1e-12


def test_dK_closed_form_against_difference():
    ctx = energy.EnergyContext(-1.5)
    u, h = 1.7, 1e-5
    fd = (float(ctx.K(u + h)) - float(ctx.K(u - h))) / (2 * h)
    assert float(ctx.dK_closed(u)) == pytest.approx(fd, rel=1e-7)
    with pytest.raises(DomainError):
        energy.EnergyContext(0.0).dK_closed(u)


def test_reconstruct_linear_family():
    body = energy.reconstruct_symmetric_solution(1.0, 0.5, 1, n=128)
    t = body.theta
    assert np.max(np.abs(body.values() - (1 - 0.5 * np.cos(t)))) < 1e-9 or \
        np.max(np.abs(body.values() - (1 + 0.5 * np.cos(t + np.pi)))) < 1e-9


def test_reconstruct_ellipse():
    body = energy.reconstruct_symmetric_solution(-2.0, 0.5, 2, n=128)
    t = body.theta
    ellipse = np.sqrt(0.25 * np.cos(t) ** 2 + 4.0 * np.sin(t) ** 2)
    assert np.max(np.abs(body.values() - ellipse)) < 1e-9


def test_reconstruct_requires_compatibility():
    with pytest.raises(CompatibilityError):
        energy.reconstruct_symmetric_solution(-8.0, 0.5, 3)


def test_count_three_lobed_solution():
    res = energy.count_solutions(-8.0, m_grid_size=200)
    assert [r["kappa"] for r in res.roots] == [3]
    assert res.count == 2 and res.n_nonconstant == 1
    assert res.roots[0]["H"] == pytest.approx(math.pi / 3, abs=1e-11)
    assert res.to_dict()["count"] == 2


def test_count_finds_two_levels_far_out():
    kappas = [r["kappa"] for r in energy.count_solutions(-20.0, m_grid_size=200).roots]
    assert kappas == [3, 4]


def test_prop83_scan_signs():
    assert energy.prop83_kernel_scan(1.5, 0.5, samples=50)["sign_constant"]
    scan = energy.prop83_kernel_scan(-2.0, 0.5, samples=50)
    assert max(abs(scan["min"]), abs(scan["max"])) < 1e-12


def test_energy_profile_columns():
    prof = energy.energy_profile(0.5, [0.2, 0.5, 0.8])
    H = prof.column("H")
    assert np.all(np.diff(H) > 0)
    for name in ("dHdm_kernel", "dHdm_boundary"):
        assert np.allclose(prof.column(name), prof.column("dHdm_fd"), rtol=1e-5)
    with pytest.raises(DomainError):
        energy.energy_profile(0.5, [0.5, 0.2])
