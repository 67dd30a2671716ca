import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpminkowski.errors import DomainError
from lpminkowski.periodic import (
    PeriodicFunction,
    check_grid_size,
    diff_matrix,
    fd_derivative,
    grid,
    spectral_derivative,
    trapezoid,
)

coef = st.floats(-1.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("n", [15, 8, 17, 0])
def test_grid_size_rejects_odd_or_small(n):
    with pytest.raises(DomainError):
        check_grid_size(n)


def test_grid_starts_at_zero_and_is_uniform():
    t = grid(32)
    assert t[0] == 0.0
    assert np.allclose(np.diff(t), 2 * np.pi / 32)


def test_trapezoid_exact_for_trig_polynomials():
    t = grid(64)
    assert trapezoid(np.cos(3 * t) ** 2) == pytest.approx(np.pi, abs=1e-14)
    assert trapezoid(np.ones(64)) == pytest.approx(2 * np.pi, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=1, max_size=8), st.lists(coef, min_size=1, max_size=8), coef)
def test_spectral_derivative_matches_exact_fourier(a, b, c):
    f = PeriodicFunction.fourier(c, a, b)
    v = f.sample(64)
    for order in (1, 2):
        assert np.allclose(spectral_derivative(v, order), f.sample(64, order), atol=1e-11)


def test_fd4_converges_at_fourth_order():
    f = PeriodicFunction.fourier(1.0, [0.3, 0.0, 0.1], [0.0, 0.2])
    errs = [np.max(np.abs(fd_derivative(f.sample(n), 2, 4) - f.sample(n, 2))) for n in (64, 128)]
    assert 12 < errs[0] / errs[1] < 20


@pytest.mark.parametrize("method", ["spectral", "fd2", "fd4"])
def test_diff_matrix_agrees_with_vector_routine(method):
    f = PeriodicFunction.fourier(0.5, [0.2, 0.1], [0.3])
    v = f.sample(32)
    d2 = diff_matrix(32, 2, method)
    if method == "spectral":
        ref = spectral_derivative(v, 2)
    else:
        ref = fd_derivative(v, 2, 2 if method == "fd2" else 4)
    assert np.allclose(d2 @ v, ref, atol=1e-12)


def test_samples_interpolate_off_grid():
    f = PeriodicFunction.fourier(1.0, [0.5], [0.0, 0.25])
    g = PeriodicFunction.from_samples(f.sample(32))
    t = np.linspace(0, 7, 50)
    for order in (0, 1, 2):
        assert np.allclose(g(t, order), f(t, order), atol=1e-12)


def test_arithmetic_preserves_representation():
    f = PeriodicFunction.fourier(1.0, [0.5])
    g = PeriodicFunction.fourier(0.0, [0.0, 1.0], [2.0])
    h = 2.0 * f - g + 1.0
    assert h.kind == "fourier"
    t = np.linspace(0, 6, 11)
    assert np.allclose(h(t), 2 * f(t) - g(t) + 1.0)


def test_analytic_requires_supplied_derivatives():
    f = PeriodicFunction.analytic(np.cos)
    assert f(0.0) == 1.0
    with pytest.raises(DomainError):
        f(0.0, 1)


@pytest.mark.parametrize("f", [PeriodicFunction.fourier(1.0, [0.1], [0.2]),
                               PeriodicFunction.from_samples(np.linspace(1, 2, 16))])
def test_json_round_trip(f):
    g = PeriodicFunction.from_json(f.to_json())
    assert np.array_equal(g.sample(16), f.sample(16))


def test_unknown_kind_rejected():
    with pytest.raises(DomainError):
        PeriodicFunction.from_dict({"kind": "spline"})
