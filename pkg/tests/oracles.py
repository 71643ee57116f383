"""Independent reference computations used only by the tests."""

import numpy as np
import scipy.linalg


def routh_hurwitz_2x2(A):
    # char poly s^2 - tr s + det
    A = np.asarray(A, float)
    return bool(np.trace(A) < 0 and np.linalg.det(A) > 0)


def routh_hurwitz_3x3(A):
    # char poly s^3 + a2 s^2 + a1 s + a0
    A = np.asarray(A, float)
    a2 = -np.trace(A)
    a1 = 0.5 * (np.trace(A) ** 2 - np.trace(A @ A))
    a0 = -np.linalg.det(A)
    return bool(a2 > 0 and a1 > 0 and a0 > 0 and a2 * a1 > a0)


def lyapunov_reference(A, Q):
    """Bartels-Stewart via scipy: solves A^T P + P A = -Q."""
    return scipy.linalg.solve_continuous_lyapunov(np.asarray(A, float).T, -np.asarray(Q, float))


def boost_roots_reference():
    """Roots of the two boost equilibrium equations for the reference
    parameters and x02 = 10, computed with sympy (17 digits)."""
    return [(0.078976758877747857, 0.36690235569938311),
            (0.30882811917103263, 0.83809764430061689)]


def linear_flow(A, x, t):
    return scipy.linalg.expm(np.asarray(A, float) * t) @ np.asarray(x, float)
