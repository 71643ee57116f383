import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from switchsurf.errors import ContractViolation, NoUniqueSolution
from switchsurf.linalg import (is_hurwitz, is_positive_definite, lyapunov_residual,
                               min_symmetric_eigenvalue, solve_lyapunov)

from oracles import lyapunov_reference, routh_hurwitz_2x2, routh_hurwitz_3x3

entries = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def test_lyapunov_identity():
    np.testing.assert_array_equal(solve_lyapunov(-np.eye(2), np.eye(2)), 0.5 * np.eye(2))


def test_lyapunov_companion_matrix():
    # hand solution of the 4x4 vectorized system
    P = solve_lyapunov([[0, 1], [-2, -3]], np.eye(2))
    np.testing.assert_allclose(P, [[1.25, 0.25], [0.25, 0.25]], atol=1e-14)


def test_lyapunov_imaginary_spectrum_has_no_unique_solution():
    with pytest.raises(NoUniqueSolution, match="no unique solution"):
        solve_lyapunov([[0, 1], [-1, 0]], np.eye(2))


def test_lyapunov_rejects_bad_shapes():
    with pytest.raises(ContractViolation):
        solve_lyapunov(np.ones((2, 3)), np.eye(2))
    with pytest.raises(ContractViolation):
        solve_lyapunov(-np.eye(2), [[1, 2], [0, 1]])


@settings(max_examples=60, deadline=None)
@given(arrays(float, (4, 4), elements=entries), arrays(float, (4, 4), elements=entries))
def test_lyapunov_residual_and_symmetry(A, B):
    A = A - 6.0 * np.eye(4)  # keeps the spectrum away from the imaginary axis
    Q = B @ B.T + np.eye(4)
    P = solve_lyapunov(A, Q)
    assert np.array_equal(P, P.T)
    assert lyapunov_residual(A, P, Q) <= 1e-10 * (1 + np.abs(Q).max())
    np.testing.assert_allclose(P, lyapunov_reference(A, Q), rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("A,expected", [
    (-np.eye(3), True),
    ([[0, 1], [-2, -3]], True),
    ([[1, 0], [0, -1]], False),
    ([[0, 1], [-1, 0]], False),
])
def test_is_hurwitz_examples(A, expected):
    assert is_hurwitz(A) is expected


@settings(max_examples=200, deadline=None)
@given(arrays(float, (2, 2), elements=entries))
def test_hurwitz_matches_routh_2x2(A):
    tr, det = np.trace(A), np.linalg.det(A)
    if abs(tr) < 1e-3 or abs(det) < 1e-3:
        return  # too close to the stability boundary to be decidable in floating point
    assert is_hurwitz(A) == routh_hurwitz_2x2(A)


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 3), elements=entries))
def test_hurwitz_matches_routh_3x3(A):
    if np.max(np.abs(np.linalg.eigvals(A).real)) == 0 or np.min(np.abs(np.linalg.eigvals(A).real)) < 1e-3:
        return
    assert is_hurwitz(A) == routh_hurwitz_3x3(A)


@pytest.mark.parametrize("M,expected", [
    (np.eye(4), True),
    ([[1, 2], [2, 1]], False),
    ([[2, 1], [1, 2]], True),
    (np.zeros((2, 2)), False),
])
def test_positive_definite_examples(M, expected):
    assert is_positive_definite(M) is expected


def test_positive_definite_rejects_asymmetric():
    with pytest.raises(ContractViolation):
        is_positive_definite([[1, 1], [0, 1]])


@pytest.mark.parametrize("M,expected", [
    (np.eye(2), 1.0),
    (np.diag([3.0, -5.0]), -5.0),
    ([[2, 1], [1, 2]], 1.0),
])
def test_min_eigenvalue_examples(M, expected):
    assert min_symmetric_eigenvalue(M) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(arrays(float, (5, 5), elements=entries))
def test_min_eigenvalue_brackets_truth(B):
    M = 0.5 * (B + B.T)
    lam = min_symmetric_eigenvalue(M)
    assert lam == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-9)
    eye = np.eye(5)
    assert is_positive_definite(M - (lam - 2e-9) * eye)
    assert not is_positive_definite(M - (lam + 2e-9) * eye)
