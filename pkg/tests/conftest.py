import pytest

from pmaps import kernels
from pmaps import _kernels_py
from pmaps.zoo import GOLDEN, beta, tent

_ACCEPTANCE = {}


@pytest.fixture
def tent_f():
    return tent(2)


@pytest.fixture
def tent_q():
    return tent(2, backend="rational")


@pytest.fixture
def golden():
    return beta(GOLDEN)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per criterion; printed in the terminal summary."""

    def record(number, ok, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


@pytest.fixture(params=["compiled", "python"])
def kernel_impl(request, monkeypatch):
    """Run a test against the compiled kernels and again against the fallback."""
    if request.param == "compiled":
        if kernels.BACKEND != "cython":
            pytest.skip("compiled kernels not built")
        return request.param
    for name in ("affine_orbit_float", "affine_orbit_int", "block_codes", "w1_sorted"):
        monkeypatch.setattr(kernels, name, getattr(_kernels_py, name))
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])

