import math

import numpy as np
import pytest

from lpminkowski import energy, obstruction
from lpminkowski.errors import DomainError, InconclusiveSign, PoleEvaluation
from lpminkowski.support_geometry import SupportBody
from lpminkowski.periodic import PeriodicFunction, grid

ONE = PeriodicFunction.constant(1.0)


def test_kernel_fourier_and_sampled_routes_agree():
    f = PeriodicFunction.fourier(1.5, [0.2, 0.3, 0.1], [0.1, 0.0, 0.4])
    exact = obstruction.kernel_Kf(f, -3.5)
    sampled = obstruction.kernel_Kf(PeriodicFunction.from_samples(f.sample(64)), -3.5)
    assert exact.kind == "fourier"
    assert np.allclose(exact.sample(64), sampled.sample(64), atol=1e-12)


def test_identity_vanishes_on_three_lobed_solution():
    p = -8.0
    m = energy.count_solutions(p, m_grid_size=200).roots[0]["m"]
    body = energy.reconstruct_symmetric_solution(p, m, 3)
    assert abs(obstruction.identity_residual(body, ONE, p)) < 1e-10


def test_certify_centroaffine_counterexample():
    rep = obstruction.certify_nonexistence(-2.0, PeriodicFunction.fourier(2.0, [0.0, 1.0]),
                                           probes=10, seed=1)
    assert rep.certified and all(r < 0 for r in rep.probe_residuals)
    assert rep.to_dict()["certified"] is True


def test_constant_f_is_inconclusive():
    with pytest.raises(InconclusiveSign):
        obstruction.certify_nonexistence(-3.0, ONE, probes=2)
    with pytest.raises(DomainError):
        obstruction.certify_nonexistence(-1.0, ONE, probes=2)


def test_xi_poles_and_symmetry():
    xi = obstruction.xi_function(-3.0)
    with pytest.raises(PoleEvaluation):
        xi(0.0)
    assert xi(math.pi / 4) == 0.0
    assert xi(0.3) == pytest.approx(-xi(math.pi / 2 - 0.3), rel=1e-12)
    assert xi(0.3) == pytest.approx(xi(-0.3), rel=1e-12)
    with pytest.raises(DomainError):
        obstruction.xi_function(-2.0)


@pytest.mark.parametrize("p", [-2.5, -3.0, -4.0])
def test_counterexample_kernel_is_negative(p):
    f, expected = obstruction.construct_counterexample(p)
    t = grid(512)
    t = t[np.abs(t - np.round(t / (np.pi / 2)) * (np.pi / 2)) > 1e-2]
    assert np.max(np.abs(obstruction.kernel_Kf(f, p)(t) - expected(t))) < 1e-8
    assert np.min(f(t)) > 0


def test_counterexample_breaks_below_minus_four():
    with pytest.raises(DomainError):
        obstruction.construct_counterexample(-5.0)
    f, _ = obstruction.construct_counterexample(-5.0, check=False)
    assert f(math.pi / 2 - 0.05) < 0


def test_random_probe_is_convex():
    rng = np.random.default_rng(3)
    for _ in range(5):
        body = SupportBody(obstruction.random_probe(rng), 256)
        assert body.convexity_margin > 0 and body.positivity_margin > 0
