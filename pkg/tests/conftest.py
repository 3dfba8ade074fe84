import numpy as np
import pytest
import scipy.linalg

from gielab.symplectic import symplectic_form

def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    lines = getattr(terminalreporter.config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_report(request):
    """Assert a verification check and echo its line in the run summary."""

    def _report(result):
        print(result.line())
        request.config._acceptance_lines.append(result.line())
        assert result.passed, result.detail

    return _report


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_symplectic(rng, n_modes=2, scale=0.4):
    """Random symplectic matrix exp(Omega H) with H symmetric."""
    h = rng.normal(size=(2 * n_modes, 2 * n_modes))
    h = scale * (h + h.T)
    return scipy.linalg.expm(symplectic_form(n_modes) @ h)


def random_physical_cm(rng, n_modes=2, nu_max=3.0):
    s = random_symplectic(rng, n_modes)
    nus = np.sort(1.0 + rng.random(n_modes) * (nu_max - 1.0))[::-1]
    return s @ np.diag(np.repeat(nus, 2)) @ s.T
