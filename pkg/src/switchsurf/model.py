"""Two-mode switched systems and their switched equilibria.

Weighting convention used throughout the package: a weight ``lam`` always
multiplies the "-" field, i.e. the convex combination is
``lam * f_minus + (1 - lam) * f_plus``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, NoConvergence, NotASwitchedEquilibrium
from .linalg import as_matrix, as_vector

FD_REL_STEP = 1e-6
NEWTON_MAX_ITER = 50
NEWTON_STEP_TOL = 1e-12
NEWTON_MAX_HALVINGS = 20
EQUILIBRIUM_RTOL = 1e-9


class VectorField:
    """A C^1 vector field on R^n with a Jacobian.

    When ``jac`` is not given the Jacobian is approximated by central
    differences with step ``1e-6 * (1 + |x_i|)``.
    """

    def __init__(self, dim: int, func: Callable, jac: Optional[Callable] = None):
        if dim < 1:
            raise ContractViolation("dimension must be positive")
        self.dim = int(dim)
        self._func = func
        self._jac = jac

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        return np.asarray(self._func(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        if self._jac is not None:
            return np.asarray(self._jac(x), dtype=float)
        return finite_difference_jacobian(self.eval, x)

    @property
    def is_affine(self):
        return False


class AffineField(VectorField):
    """``f(x) = A x + b`` with the exact Jacobian ``A``."""

    def __init__(self, A, b):
        A = as_matrix(A, "A")
        b = as_vector(b, "b")
        if A.shape[0] != A.shape[1] or A.shape[0] != b.size:
            raise ContractViolation(
                f"dimension mismatch: A is {A.shape}, b has {b.size} entries")
        self.A = A
        self.b = b
        super().__init__(b.size, self._affine)

    def _affine(self, x):
        return self.A @ x + self.b

    def jacobian(self, x):
        return self.A.copy()

    @property
    def is_affine(self):
        return True


def affine_field(A, b) -> AffineField:
    return AffineField(A, b)


def finite_difference_jacobian(func, x):
    x = np.asarray(x, dtype=float)
    n = x.size
    cols = []
    for i in range(n):
        h = FD_REL_STEP * (1.0 + abs(x[i]))
        e = np.zeros(n)
        e[i] = h
        cols.append((func(x + e) - func(x - e)) / (2.0 * h))
    return np.column_stack(cols)


@dataclass(frozen=True)
class SwitchedSystem:
    """``x' = f_minus(x)`` when sigma = -1 and ``x' = f_plus(x)`` when sigma = +1."""

    minus: VectorField
    plus: VectorField

    def __post_init__(self):
        if self.minus.dim != self.plus.dim:
            raise ContractViolation("both fields must have the same dimension")

    @property
    def dim(self):
        return self.minus.dim

    @property
    def is_affine(self):
        return self.minus.is_affine and self.plus.is_affine

    def field(self, mode):
        if mode == -1:
            return self.minus
        if mode == 1:
            return self.plus
        raise ContractViolation(f"mode must be -1 or +1, got {mode!r}")

    def swapped(self):
        return SwitchedSystem(self.plus, self.minus)

    @classmethod
    def affine(cls, A_minus, b_minus, A_plus, b_plus):
        return cls(AffineField(A_minus, b_minus), AffineField(A_plus, b_plus))

    @classmethod
    def affine_plus_weighted(cls, A_minus, b_minus, A_plus, b_plus, lam_plus):
        """Build from data whose weight multiplies the "+" field.

        Returns the system together with the weight converted to the package
        convention (``1 - lam_plus``).
        """
        return cls.affine(A_minus, b_minus, A_plus, b_plus), 1.0 - float(lam_plus)


@dataclass(frozen=True)
class SwitchedEquilibrium:
    x0: np.ndarray
    lambda0: float
    indeterminate: bool = False
    iterations: int = field(default=0, compare=False)

    def residual(self, sys: SwitchedSystem):
        return self.lambda0 * sys.minus(self.x0) + (1.0 - self.lambda0) * sys.plus(self.x0)

    def residual_ok(self, sys: SwitchedSystem, rtol=EQUILIBRIUM_RTOL):
        fm, fp = sys.minus(self.x0), sys.plus(self.x0)
        scale = 1.0 + np.linalg.norm(fm) + np.linalg.norm(fp)
        return bool(np.linalg.norm(self.residual(sys)) <= rtol * scale)


def convex_combination(sys: SwitchedSystem, lam: float) -> VectorField:
    """``lam * f_minus + (1 - lam) * f_plus`` as a vector field."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ContractViolation(f"weight must lie in [0, 1], got {lam}")
    fm, fp = sys.minus, sys.plus
    if sys.is_affine:
        return AffineField(lam * fm.A + (1 - lam) * fp.A, lam * fm.b + (1 - lam) * fp.b)
    return VectorField(
        sys.dim,
        lambda x: lam * fm.eval(x) + (1 - lam) * fp.eval(x),
        lambda x: lam * fm.jacobian(x) + (1 - lam) * fp.jacobian(x),
    )


def find_switched_equilibrium(sys: SwitchedSystem, guess_x, guess_lambda: float,
                              pin: int) -> SwitchedEquilibrium:
    """Newton search for ``(x0, lam0)`` with ``lam0 f-(x0) + (1-lam0) f+(x0) = 0``.

    Coordinate ``pin`` of ``x0`` is held at ``guess_x[pin]`` so the system is
    square. Steps are least-squares solutions, so a singular Jacobian (e.g.
    identical fields) leaves the unidentifiable directions at their guesses.
    """
    x = as_vector(guess_x, "guess_x").copy()
    n = sys.dim
    if x.size != n:
        raise ContractViolation(f"guess_x has {x.size} entries, expected {n}")
    if not 0 <= pin < n:
        raise ContractViolation(f"pin index {pin} out of range")
    free = [i for i in range(n) if i != pin]
    lam = float(guess_lambda)

    def residual(x, lam):
        return lam * sys.minus(x) + (1 - lam) * sys.plus(x)

    r = residual(x, lam)
    converged = False
    it = 0
    for it in range(1, NEWTON_MAX_ITER + 1):
        Jx = lam * sys.minus.jacobian(x) + (1 - lam) * sys.plus.jacobian(x)
        J = np.column_stack([Jx[:, free], sys.minus(x) - sys.plus(x)])
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        rnorm = np.linalg.norm(r)
        t = 1.0
        for _ in range(NEWTON_MAX_HALVINGS + 1):
            x_new = x.copy()
            x_new[free] += t * step[:-1]
            lam_new = lam + t * step[-1]
            r_new = residual(x_new, lam_new)
            if np.linalg.norm(r_new) < rnorm or rnorm == 0.0:
                break
            t *= 0.5
        x, lam, r = x_new, lam_new, r_new
        if t * np.linalg.norm(step) <= NEWTON_STEP_TOL * (1.0 + np.linalg.norm(x) + abs(lam)):
            converged = True
            break
    if not converged or not np.all(np.isfinite(x)):
        raise NoConvergence(f"no convergence after {it} Newton iterations")

    fm, fp = sys.minus(x), sys.plus(x)
    scale = 1.0 + np.linalg.norm(fm) + np.linalg.norm(fp)
    indeterminate = bool(np.linalg.norm(fm) <= EQUILIBRIUM_RTOL * scale
                         and np.linalg.norm(fp) <= EQUILIBRIUM_RTOL * scale)
    if indeterminate:
        lam = min(max(float(guess_lambda), 0.0), 1.0)
    elif not 0.0 <= lam <= 1.0:
        raise NotASwitchedEquilibrium(f"not a switched equilibrium: weight {lam:.6g} outside [0, 1]")
    eq = SwitchedEquilibrium(x, float(lam), indeterminate, it)
    if not eq.residual_ok(sys):
        raise NoConvergence("Newton stopped with residual above tolerance")
    return eq
