import numpy as np
import pytest

from lpminkowski.periodic import PeriodicFunction

# criterion number -> (passed, detail); filled by the acceptance tests
ACCEPTANCE = {}


def random_positive_fourier(rng, harmonics=6, min_value=0.3):
    """Trigonometric polynomial with ``min f`` in ``[min_value, min_value + 0.7]``."""
    k = np.arange(1, harmonics + 1)
    a = rng.standard_normal(harmonics) / k
    b = rng.standard_normal(harmonics) / k
    raw = PeriodicFunction.fourier(0.0, a, b).sample(2048)
    scale = rng.uniform(0.2, 1.0) / (raw.max() - raw.min())
    const = min_value + rng.uniform(0.0, 0.7) - scale * raw.min()
    return PeriodicFunction.fourier(const, a * scale, b * scale)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
