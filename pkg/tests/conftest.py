import numpy as np
import pytest

from tingley import _backend


def cgauss(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def lapack_trace_norm(a):
    """Independent oracle: LAPACK singular values via numpy."""
    return float(np.linalg.svd(a, compute_uv=False).sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=sorted(_backend.available_kernels()))
def kernel(request):
    return _backend.available_kernels()[request.param]


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
