"""Small dense linear algebra: Lyapunov equations and definiteness tests.

Targets n <= 10. The Lyapunov equation is solved by Kronecker vectorization,
Hurwitz-ness is decided by the Lyapunov criterion, and the smallest symmetric
eigenvalue is found by bisection on Cholesky success, so no general
eigensolver is involved anywhere in this module.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import ContractViolation, NoUniqueSolution

# All tolerances of this module.
SYMMETRY_RTOL = 1e-12
PIVOT_RTOL = 1e-13
MAX_BISECTIONS = 400


def as_matrix(M, name="matrix"):
    M = np.array(M, dtype=float)
    if M.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractViolation(f"{name} has non-finite entries")
    return M


def as_vector(v, name="vector"):
    v = np.array(v, dtype=float).reshape(-1)
    if v.size == 0:
        raise ContractViolation(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ContractViolation(f"{name} has non-finite entries")
    return v


def _square(M, name):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {M.shape}")
    return M


def is_symmetric(M, rtol=SYMMETRY_RTOL):
    M = np.asarray(M, dtype=float)
    scale = max(1.0, np.max(np.abs(M))) if M.size else 1.0
    return bool(np.max(np.abs(M - M.T), initial=0.0) <= rtol * scale)


def _symmetric(M, name):
    M = _square(M, name)
    if not is_symmetric(M):
        raise ContractViolation(f"{name} is not symmetric")
    return M


def symmetrize(M):
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def lyapunov_operator(A):
    """Matrix K with K @ vec(P) = vec(A^T P + P A), column-major vec."""
    n = A.shape[0]
    eye = np.eye(n)
    return np.kron(eye, A.T) + np.kron(A.T, eye)


def solve_lyapunov(A, Q):
    """Solve ``A^T P + P A = -Q`` for symmetric P.

    Raises NoUniqueSolution when A and -A share an eigenvalue, which makes
    the vectorized n^2 x n^2 system singular.
    """
    A = _square(A, "A")
    Q = _symmetric(Q, "Q")
    n = A.shape[0]
    if Q.shape != (n, n):
        raise ContractViolation(f"Q has shape {Q.shape}, expected {(n, n)}")
    K = lyapunov_operator(A)
    rhs = -Q.reshape(-1, order="F")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(K, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= PIVOT_RTOL * max(np.abs(K).max(), np.finfo(float).tiny):
        raise NoUniqueSolution("no unique solution: A and -A share an eigenvalue")
    p = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    # one step of iterative refinement
    p = p + scipy.linalg.lu_solve((lu, piv), rhs - K @ p, check_finite=False)
    P = symmetrize(p.reshape((n, n), order="F"))
    if not np.all(np.isfinite(P)):
        raise NoUniqueSolution("no unique solution: non-finite result")
    return P


def lyapunov_residual(A, P, Q):
    """Max-norm of ``A^T P + P A + Q``."""
    A, P, Q = (np.asarray(M, dtype=float) for M in (A, P, Q))
    return float(np.max(np.abs(A.T @ P + P @ A + Q)))


def is_positive_definite(M):
    """True iff a Cholesky factorization of symmetric M succeeds."""
    M = _symmetric(M, "M")
    try:
        L = np.linalg.cholesky(symmetrize(M))
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.diag(L) > 0.0))


def is_hurwitz(A):
    """True iff every eigenvalue of A has negative real part.

    Uses the Lyapunov criterion: A is Hurwitz exactly when
    ``A^T P + P A = -I`` has a positive-definite solution.
    """
    A = _square(A, "A")
    try:
        P = solve_lyapunov(A, np.eye(A.shape[0]))
    except NoUniqueSolution:
        return False
    return is_positive_definite(P)


def gershgorin_bounds(M):
    M = np.asarray(M, dtype=float)
    d = np.diag(M)
    r = np.sum(np.abs(M), axis=1) - np.abs(d)
    return float(np.min(d - r)), float(np.max(d + r))


def min_symmetric_eigenvalue(M):
    """Smallest eigenvalue of symmetric M by bisection on definiteness.

    The returned value ``lam`` satisfies ``M - lam*I`` positive definite (as
    decided by Cholesky), so it is a lower bound up to rounding of the
    factorization. Bisection runs until the bracket can no longer shrink.
    """
    M = _symmetric(M, "M")
    n = M.shape[0]
    eye = np.eye(n)
    lo, hi = gershgorin_bounds(M)
    width = max(hi - lo, 1.0)
    lo -= width
    hi += width
    while not is_positive_definite(M - lo * eye):
        lo -= width
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if is_positive_definite(M - mid * eye):
            lo = mid
        else:
            hi = mid
    return float(lo)
