import numpy as np
import pytest


def rel_err(a, b):
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def within_se(estimate, target, se, k=3.0):
    return abs(estimate - target) <= k * se


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def mixed_sample(rng, n):
    """Normal, exponential or symmetric-uniform shape at a random scale in
    10^-3 .. 10^3."""
    scale = 10.0 ** rng.uniform(-3, 3)
    kind = rng.integers(3)
    if kind == 0:
        x = rng.standard_normal(n) + rng.uniform(-2, 2)
    elif kind == 1:
        x = rng.exponential(size=n)
    else:
        x = rng.uniform(-1, 1, n)
    return x * scale


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one verdict line per acceptance criterion for the summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
