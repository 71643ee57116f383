"""State-feedback switching rules ``sigma(x) = sign(s(x))``.

Mode-selection contract: ``s(x) > 0`` selects the "+" field, ``s(x) < 0``
the "-" field. ``s(x) = 0`` is the switching surface and is never resolved
inside a rule; the simulator treats it with Filippov convexification.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, DegenerateError
from .linalg import as_vector
from .lyapunov import QuadraticLyapunov
from .model import SwitchedEquilibrium, SwitchedSystem, finite_difference_jacobian

DEGENERATE_RTOL = 1e-14


@dataclass(frozen=True)
class QuadraticForm:
    """``s(x) = x^T M x + c^T x + d`` with symmetric M."""

    M: np.ndarray
    c: np.ndarray
    d: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return float(x @ self.M @ x + self.c @ x + self.d)

    def gradient(self, x):
        return 2.0 * self.M @ np.asarray(x, dtype=float) + self.c


@dataclass(frozen=True)
class SwitchingRule:
    kind: str
    x0: np.ndarray
    threshold: Callable = field(repr=False)
    normal: Optional[np.ndarray] = None
    grad: Optional[Callable] = field(default=None, repr=False)
    form: Optional[QuadraticForm] = field(default=None, repr=False)
    diff_normal: Optional[np.ndarray] = None

    def __call__(self, x):
        return self.s(x)

    def s(self, x):
        if self.normal is not None:
            return float((np.asarray(x, dtype=float) - self.x0) @ self.normal)
        return float(self.threshold(np.asarray(x, dtype=float)))

    def sigma(self, x):
        """+1, -1, or 0 on the surface."""
        return int(np.sign(self.s(x)))

    def gradient(self, x):
        if self.normal is not None:
            return self.normal
        if self.grad is not None:
            return np.asarray(self.grad(np.asarray(x, dtype=float)), dtype=float)
        g = finite_difference_jacobian(lambda y: np.atleast_1d(self.s(y)), np.asarray(x, float))
        return g.reshape(-1)

    @property
    def is_linear(self):
        return self.normal is not None

    def negated(self):
        """Same surface with the mode assignment reversed."""
        if self.normal is not None:
            return linear_threshold(self.kind, self.x0, -self.normal)
        form = None
        if self.form is not None:
            form = QuadraticForm(-self.form.M, -self.form.c, -self.form.d)
        grad = (lambda x: -self.gradient(x))
        return SwitchingRule(self.kind, self.x0, lambda x: -self.threshold(x),
                             grad=grad, form=form)

    def formula(self, digits=6):
        """Closed-form ``s(x)`` string, available for linear rules and affine systems."""
        if self.normal is not None:
            form = QuadraticForm(np.zeros((self.x0.size,) * 2), self.normal,
                                 -float(self.normal @ self.x0))
        elif self.form is not None:
            form = self.form
        else:
            return None
        return format_quadratic(form, digits)

    def to_dict(self):
        out = {"kind": self.kind, "x0": self.x0.tolist(), "formula": self.formula()}
        if self.normal is not None:
            out["normal"] = self.normal.tolist()
        if self.diff_normal is not None:
            out["difference_normal"] = self.diff_normal.tolist()
        return out


def _term(coef, name, digits):
    return f"{coef:+.{digits}g}" + (f"*{name}" if name else "")


def format_quadratic(form: QuadraticForm, digits=6):
    n = form.c.size
    terms = []
    for i in range(n):
        for j in range(i, n):
            coef = form.M[i, i] if i == j else 2.0 * form.M[i, j]
            if coef != 0.0:
                name = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
                terms.append(_term(coef, name, digits))
    for i in range(n):
        if form.c[i] != 0.0:
            terms.append(_term(form.c[i], f"x{i + 1}", digits))
    if form.d != 0.0 or not terms:
        terms.append(_term(form.d, "", digits))
    return " ".join(terms)


def linear_threshold(kind, x0, normal, diff_normal=None) -> SwitchingRule:
    x0 = as_vector(x0, "x0")
    normal = as_vector(normal, "normal")
    if normal.size != x0.size:
        raise ContractViolation("normal and x0 dimensions differ")
    if not np.any(normal):
        raise DegenerateError("degenerate: zero normal vector")
    return SwitchingRule(kind, x0, threshold=None, normal=normal, diff_normal=diff_normal)


def _is_zero(v, scale):
    return np.linalg.norm(v) <= DEGENERATE_RTOL * max(scale, 1e-300)


def quadratic_rule(L: QuadraticLyapunov, sys: SwitchedSystem) -> SwitchingRule:
    """``s(x) = V'(x) f_minus(x) - V'(x) f_plus(x)``.

    sigma = +1 picks the "+" field exactly when it has the smaller Lyapunov
    derivative.
    """
    if L.dim != sys.dim:
        raise ContractViolation("Lyapunov function and system dimensions differ")
    P, x0 = L.P, L.x0
    fm, fp = sys.minus, sys.plus

    def s(x):
        return float(2.0 * (x - x0) @ P @ (fm(x) - fp(x)))

    def grad(x):
        diff = fm(x) - fp(x)
        dJ = fm.jacobian(x) - fp.jacobian(x)
        return 2.0 * P @ diff + dJ.T @ (2.0 * P @ (x - x0))

    form = None
    if sys.is_affine:
        dA, db = fm.A - fp.A, fm.b - fp.b
        PdA = P @ dA
        M = PdA + PdA.T
        c = 2.0 * P @ db - 2.0 * PdA.T @ x0
        d = -2.0 * float(x0 @ P @ db)
        form = QuadraticForm(M, c, d)
    return SwitchingRule("quadratic", x0, threshold=s, grad=grad, form=form)


def linear_rule(L: QuadraticLyapunov, sys: SwitchedSystem,
                eq: SwitchedEquilibrium) -> SwitchingRule:
    """``s(x) = <x - x0, V''(x0) f_minus(x0)>`` with ``V'' = 2P``."""
    x0 = eq.x0
    if not np.allclose(x0, L.x0, rtol=0, atol=1e-12 * (1 + np.abs(x0).max())):
        raise ContractViolation("equilibrium and Lyapunov centre differ")
    fm0, fp0 = sys.minus(x0), sys.plus(x0)
    if _is_zero(fm0, np.linalg.norm(fm0) + np.linalg.norm(fp0)) or eq.indeterminate:
        raise DegenerateError("degenerate: x0 is a true equilibrium of mode -")
    H = L.hessian()
    return linear_threshold("linear", L.x0, H @ fm0, diff_normal=H @ (fm0 - fp0))


def reduced_rule(L: QuadraticLyapunov, b_minus, b_plus) -> SwitchingRule:
    """``s(x) = <x - x0, 2P (b_minus - b_plus)>``, the rule for equal matrices."""
    db = as_vector(b_minus, "b_minus") - as_vector(b_plus, "b_plus")
    if not np.any(db):
        raise DegenerateError("degenerate: b_minus equals b_plus")
    return linear_threshold("reduced", L.x0, L.hessian() @ db)
