"""Common quadratic Lyapunov functions: verification, heuristic synthesis,
and the Demidovich sufficient check."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractViolation, CQLFError, NoUniqueSolution
from .linalg import (as_matrix, as_vector, is_positive_definite, is_symmetric,
                     min_symmetric_eigenvalue, solve_lyapunov, symmetrize)
from .model import SwitchedEquilibrium, SwitchedSystem, VectorField, convex_combination

DEMIDOVICH_MARGIN = 1e-9


@dataclass(frozen=True)
class SamplingSpec:
    """Axis-aligned box ``[lower, upper]`` sampled uniformly.

    Points come from ``numpy.random.default_rng(seed)`` (PCG64), so a sampling box
    reproduces the same points bit-for-bit.
    """

    lower: np.ndarray
    upper: np.ndarray
    count: int
    seed: int = 0

    def __post_init__(self):
        lo, hi = as_vector(self.lower, "lower"), as_vector(self.upper, "upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.size != hi.size or np.any(hi < lo):
            raise ContractViolation("sampling box has mismatched or inverted bounds")

    @classmethod
    def around(cls, center, half_width, count, seed=0):
        c = as_vector(center, "center")
        h = np.broadcast_to(np.asarray(half_width, dtype=float), c.shape)
        return cls(c - h, c + h, count, seed)

    @property
    def dim(self):
        return self.lower.size

    def points(self):
        if self.count < 1:
            raise ContractViolation("empty sampling domain")
        rng = np.random.default_rng(self.seed)
        return self.lower + (self.upper - self.lower) * rng.random((self.count, self.dim))


@dataclass(frozen=True)
class QuadraticLyapunov:
    """``V(x) = (x - x0)^T P (x - x0)`` with certified (or sampled) decay ``alpha``."""

    P: np.ndarray
    x0: np.ndarray
    alpha: float
    certified: bool = True
    source: str = "user"

    def __post_init__(self):
        P = as_matrix(self.P, "P")
        x0 = as_vector(self.x0, "x0")
        if P.shape != (x0.size, x0.size):
            raise ContractViolation("P and x0 dimensions differ")
        if not is_symmetric(P):
            raise ContractViolation("P is not symmetric")
        object.__setattr__(self, "P", symmetrize(P))
        object.__setattr__(self, "x0", x0)

    @property
    def dim(self):
        return self.x0.size

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.x0
        return float(d @ self.P @ d)

    def gradient(self, x):
        return 2.0 * self.P @ (np.asarray(x, dtype=float) - self.x0)

    def hessian(self):
        return 2.0 * self.P

    def derivative(self, x, fx):
        """Lie derivative ``V'(x) fx``."""
        return float(self.gradient(x) @ np.asarray(fx, dtype=float))

    def with_alpha(self, alpha, certified=None):
        return QuadraticLyapunov(self.P, self.x0, float(alpha),
                                 self.certified if certified is None else certified,
                                 self.source)


@dataclass(frozen=True)
class CQLFCheck:
    alpha: float
    certified: bool
    per_mode: tuple


def _check_P(P, n):
    P = as_matrix(P, "P")
    if P.shape != (n, n):
        raise ContractViolation(f"P has shape {P.shape}, expected {(n, n)}")
    if not is_symmetric(P) or not is_positive_definite(P):
        raise CQLFError("P is not symmetric positive definite")
    return symmetrize(P)


def decay_margins(sys: SwitchedSystem, eq: SwitchedEquilibrium, P,
                  domain: Optional[SamplingSpec] = None) -> CQLFCheck:
    """Per-mode decay constants without the positivity verdict."""
    P = _check_P(P, sys.dim)
    if sys.is_affine:
        per_mode = tuple(
            min_symmetric_eigenvalue(-(f.A.T @ P + P @ f.A)) for f in (sys.minus, sys.plus))
        return CQLFCheck(min(per_mode), True, per_mode)
    if domain is None:
        raise ContractViolation("nonlinear systems need a sampling domain")
    pts = domain.points()
    x0 = eq.x0
    d = pts - x0
    sq = np.einsum("ij,ij->i", d, d)
    keep = sq > 0.0
    if not np.any(keep):
        raise ContractViolation("empty sampling domain")
    per_mode = []
    for f in (sys.minus, sys.plus):
        f0 = f(x0)
        vals = [-(2.0 * P @ di) @ (f(x) - f0) / s
                for x, di, s in zip(pts[keep], d[keep], sq[keep])]
        per_mode.append(float(min(vals)))
    return CQLFCheck(min(per_mode), False, tuple(per_mode))


def verify_cqlf(sys: SwitchedSystem, eq: SwitchedEquilibrium, P,
                domain: Optional[SamplingSpec] = None) -> CQLFCheck:
    """Certify ``V'(x)(f(x) - f(x0)) <= -alpha |x - x0|^2`` for both modes.

    Affine systems get the exact constant (smallest eigenvalue of
    ``-(A^T P + P A)`` over the two modes); other systems get a sampled
    estimate flagged ``certified=False``. Raises CQLFError if alpha <= 0.
    """
    check = decay_margins(sys, eq, P, domain)
    if not check.alpha > 0.0:
        raise CQLFError(f"decay constant {check.alpha:.6g} is not positive", check.alpha)
    return check


def _candidates(sys, eq):
    n = sys.dim
    x0 = eq.x0
    eye = np.eye(n)
    if not eq.indeterminate:
        J = convex_combination(sys, eq.lambda0).jacobian(x0)
        yield "convex_combination", lambda: solve_lyapunov(J, eye)
    yield "demidovich", lambda: 0.5 * eye

    def averaged():
        Pm = solve_lyapunov(sys.minus.jacobian(x0), eye)
        Pp = solve_lyapunov(sys.plus.jacobian(x0), eye)
        return 0.5 * (Pm + Pp)

    yield "averaged", averaged


def synthesize_cqlf(sys: SwitchedSystem, eq: SwitchedEquilibrium,
                    domain: Optional[SamplingSpec] = None) -> QuadraticLyapunov:
    """First heuristic candidate P that passes :func:`verify_cqlf`.

    Failure is not a proof that no common quadratic Lyapunov function exists.
    """
    tried = []
    for name, make in _candidates(sys, eq):
        try:
            P = make()
            check = verify_cqlf(sys, eq, P, domain)
        except (NoUniqueSolution, CQLFError) as exc:
            tried.append(f"{name}: {exc}")
            continue
        return QuadraticLyapunov(P, eq.x0, check.alpha, check.certified, name)
    raise CQLFError("no CQLF found by heuristics (" + "; ".join(tried) + ")")


@dataclass(frozen=True)
class DemidovichResult:
    passed: bool
    worst: float
    witness: Optional[np.ndarray]
    sampled: bool = True

    def __bool__(self):
        return self.passed


def demidovich_check(f: VectorField, domain: SamplingSpec) -> DemidovichResult:
    """Sampled test that ``f_x + f_x^T`` is uniformly negative definite."""
    worst, witness = -np.inf, None
    for x in domain.points():
        J = f.jacobian(x)
        lam = min_symmetric_eigenvalue(symmetrize(J + J.T))
        if lam > worst:
            worst, witness = lam, x
    return DemidovichResult(bool(worst <= -DEMIDOVICH_MARGIN), float(worst), witness)
