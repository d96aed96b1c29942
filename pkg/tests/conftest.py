import numpy as np
import pytest

from nsdiag.runs import NSRun
from nsdiag.samplers import SamplerSettings, perfect_ns_gaussian

# Acceptance criteria results, printed one per line at session end.
ACCEPTANCE_RESULTS = []


def record_criterion(number, description, passed, detail=""):
    ACCEPTANCE_RESULTS.append((number, description, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, description, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d} [{status}] {description}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def tiny_run():
    """The canonical 4-point, 2-thread example run."""
    return NSRun(
        params=np.array([[0.0], [1.0], [2.0], [3.0]]),
        loglike=np.array([1.0, 2.0, 3.0, 4.0]),
        birth_loglike=np.array([-np.inf, -np.inf, 1.0, 2.0]),
        nlive=np.array([2, 2, 2, 1]),
        thread_labels=np.array([0, 1, 0, 1]),
        meta={"likelihood": "toy"},
    )


def make_synthetic_run(rng, nlive, n_deaths, d=2):
    """A structurally valid run from an abstract constant-n birth process."""
    live_logl = list(np.sort(rng.random(nlive)))
    live_birth = [-np.inf] * nlive
    params, logl, birth = [], [], []
    for _ in range(n_deaths):
        worst = int(np.argmin(live_logl))
        contour = live_logl[worst]
        params.append(rng.standard_normal(d))
        logl.append(contour)
        birth.append(live_birth[worst])
        live_logl[worst] = contour + rng.random() + 1e-9
        live_birth[worst] = contour
    order = np.argsort(live_logl)
    for i in order:
        params.append(rng.standard_normal(d))
        logl.append(live_logl[i])
        birth.append(live_birth[i])
    return NSRun.from_points(np.array(params), np.array(logl), np.array(birth))


@pytest.fixture(scope="session")
def gauss_run_small():
    """One shared perfect-sampler run (d=2, nlive=100)."""
    return perfect_ns_gaussian(2, SamplerSettings(nlive=100, seed=20))
