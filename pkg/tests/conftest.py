import numpy as np
import pytest

from smop import ProblemData, SparseMatrix


@pytest.fixture
def scalar_data():
    """1x1 instance: phi(lam) = min(lam, 1), solution x(lam) = max(1 - lam, 0)."""
    return ProblemData(SparseMatrix.from_dense([[1.0]]), np.array([1.0]), rho=0.3)


@pytest.fixture
def diagonal_data():
    """diag(1, 2) instance: for lam <= 1, x(lam) = (1 - lam, (2 - lam)/4) and
    phi(lam) = lam * sqrt(5)/2 (verified by scalar calculus per coordinate)."""
    A = SparseMatrix.from_dense([[1.0, 0.0], [0.0, 2.0]])
    return ProblemData(A, np.array([1.0, 1.0]), rho=0.5)
