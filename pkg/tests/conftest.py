import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_complex(dim_rows: int, dim_cols: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim_rows, dim_cols)) + 1j * rng.standard_normal((dim_rows, dim_cols))


def random_hermitian_matrix(dim: int, seed: int) -> np.ndarray:
    A = random_complex(dim, dim, seed)
    return (A + np.conj(A).T) / 2.0


def random_unitary(dim: int, seed: int) -> np.ndarray:
    Q, R = np.linalg.qr(random_complex(dim, dim, seed))
    # fix the diagonal phases so Q is unique given the seed
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def assert_reports_close(actual, expected, rtol: float = 1e-9) -> None:
    """Structural golden comparison: exact metadata, tolerant floats."""
    assert actual.scenario == expected.scenario
    assert set(actual.params) == set(expected.params)
    for key, value in expected.params.items():
        got = actual.params[key]
        if isinstance(value, float):
            assert got == pytest.approx(value, rel=rtol, abs=1e-30), f"param {key}"
        else:
            assert got == value, f"param {key}"
    assert [c.name for c in actual.checks] == [c.name for c in expected.checks]
    for got, want in zip(actual.checks, expected.checks):
        assert got.passed == want.passed, got.name
        assert got.tolerance == pytest.approx(want.tolerance, rel=rtol), got.name
        # residuals are rounding-level noise; only their magnitude class matters
        assert got.residual <= max(10.0 * want.residual, got.tolerance, 1e-12), got.name
    assert len(actual.eigen_table) == len(expected.eigen_table)
    for got, want in zip(actual.eigen_table, expected.eigen_table):
        assert (got.n, got.kappa, got.state) == (want.n, want.kappa, want.state)
        assert got.eps1 == pytest.approx(want.eps1, rel=rtol, abs=1e-12)
        assert got.nu == pytest.approx(want.nu, rel=rtol, abs=1e-12)
        assert got.eps2 == pytest.approx(want.eps2, rel=rtol, abs=1e-12)
        assert got.in_safe_margin == want.in_safe_margin
        if want.eps2_oracle is None:
            assert got.eps2_oracle is None
        else:
            assert got.eps2_oracle == pytest.approx(want.eps2_oracle, rel=rtol, abs=1e-12)
    assert [e.name for e in actual.errata] == [e.name for e in expected.errata]


_CRITERION_LINES: list[tuple[int, str]] = []


@pytest.fixture
def criterion():
    """Recorder for acceptance criteria verdicts.

    Each call prints and stores one pass/fail line; the stored lines are
    replayed in the terminal summary so the verdicts stay visible even
    when capture hides per-test output.
    """

    def record(number: int, text: str, ok: bool) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        _CRITERION_LINES.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERION_LINES):
            terminalreporter.write_line(line)
