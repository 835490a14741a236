import numpy as np
import pytest

from creditscreen import Income, IncomeKind, ModelConfig, sqrt_power


@pytest.fixture
def degenerate_t3():
    """Two types, firm certain of impatience: the worked low-path instance."""
    return ModelConfig(
        T=3, deltas=(0.4, 0.9), p=(1.0, 0.0), q=(0.75, 0.25), R=1.0,
        income=Income(IncomeKind.TOTAL_NPV, 3.0), utility=sqrt_power())


@pytest.fixture
def penalty_n2():
    """Two-type general instance with the quoted continuation-cost fall."""
    return ModelConfig(
        T=3, deltas=(0.5, 1.0), p=(0.5, 0.5), q=(0.5, 0.5), R=1.5,
        income=Income(IncomeKind.TOTAL_NPV, 3.0), utility=sqrt_power())


def uniform_grid_config(n_types: int, *, lo: float = 0.5, hi: float = 1.0,
                        R: float = 1.5, income: float = 3.0) -> ModelConfig:
    """Uniform discount grid with shared uniform beliefs (the figure setup)."""
    deltas = tuple(lo + (hi - lo) * i / (n_types - 1) for i in range(n_types))
    uniform = (1.0 / n_types,) * n_types
    return ModelConfig(
        T=3, deltas=deltas, p=uniform, q=uniform, R=R,
        income=Income(IncomeKind.TOTAL_NPV, income), utility=sqrt_power())


@pytest.fixture
def figure_n10():
    return uniform_grid_config(10)


def assert_close(actual, expected, tol, label=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    err = float(np.max(np.abs(actual - expected)))
    assert err <= tol, f"{label} off by {err:.3e} (tolerance {tol:.1e})"
