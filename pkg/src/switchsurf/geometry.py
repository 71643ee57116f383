"""Regions where each mode decreases V, their sphere-bounded inner
approximations, and sampled verification of the region claims.

Notation: ``H_i(x) = -alpha |x - x0|^2 + V'(x) f_i(x0)``. The set
``{H_i < 0}`` is the exterior of a sphere through x0. With the Euclidean norm
in the decay condition this boundary is a sphere, not a general ellipsoid.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import ContractViolation, DegenerateError
from .lyapunov import QuadraticLyapunov, SamplingSpec
from .model import SwitchedEquilibrium, SwitchedSystem, VectorField
from .rules import SwitchingRule

BOUNDARY_EXCLUSION = 1e-12
TANGENCY_TOL = 1e-9
SPHERE_RESIDUAL_TOL = 1e-9
DEFAULT_COUNT = 10_000
DEFAULT_BOX_FACTOR = 5.0
MAX_WITNESSES = 5


def decrease_rate(L: QuadraticLyapunov, f: VectorField, x):
    return L.derivative(x, f(x))


def omega_membership(L: QuadraticLyapunov, f: VectorField, x) -> bool:
    """x lies in the open set where ``V'(x) f(x) < 0``."""
    return decrease_rate(L, f, x) < 0.0


def h_value(L: QuadraticLyapunov, f_at_x0, x) -> float:
    d = np.asarray(x, dtype=float) - L.x0
    return float(-L.alpha * (d @ d) + 2.0 * (L.P @ d) @ np.asarray(f_at_x0, dtype=float))


def h_gradient(L: QuadraticLyapunov, f_at_x0, x):
    d = np.asarray(x, dtype=float) - L.x0
    return -2.0 * L.alpha * d + 2.0 * L.P @ np.asarray(f_at_x0, dtype=float)


def omega_alpha_membership(L: QuadraticLyapunov, f_at_x0, x) -> bool:
    if not L.alpha > 0:
        raise ContractViolation("alpha must be positive")
    return h_value(L, f_at_x0, x) < 0.0


@dataclass(frozen=True)
class SphereRegion:
    center: np.ndarray
    radius: float
    side: str = "exterior"

    def contains(self, x) -> bool:
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center)
        return bool(r > self.radius) if self.side == "exterior" else bool(r < self.radius)

    def boundary_points(self, count=256, seed=0):
        """Points on the sphere: a polygon for n = 2, random directions otherwise."""
        n = self.center.size
        if n == 2:
            th = np.linspace(0.0, 2.0 * np.pi, count + 1)
            dirs = np.column_stack([np.cos(th), np.sin(th)])
        else:
            dirs = np.random.default_rng(seed).standard_normal((count, n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return self.center + self.radius * dirs


def omega_alpha_sphere(L: QuadraticLyapunov, f_at_x0) -> SphereRegion:
    """Boundary of ``{H < 0}``: centre ``x0 + P f(x0)/alpha``, radius ``|P f(x0)|/alpha``."""
    f0 = np.asarray(f_at_x0, dtype=float)
    if not L.alpha > 0:
        raise ContractViolation("alpha must be positive")
    shift = L.P @ f0 / L.alpha
    radius = float(np.linalg.norm(shift))
    if radius == 0.0:
        raise DegenerateError("degenerate: f(x0) = 0, the region is all of R^n minus x0")
    return SphereRegion(L.x0 + shift, radius, "exterior")


def angle_between(a, b):
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    return float(2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int = 0
    excluded: int = 0
    witnesses: List[list] = field(default_factory=list)
    detail: str = ""
    gating: bool = True

    def fail(self, point, note=""):
        self.passed = False
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append({"x": np.asarray(point, dtype=float).tolist(), "note": note})

    def to_dict(self):
        return {"passed": self.passed, "checked": self.checked, "excluded": self.excluded,
                "witnesses": self.witnesses, "detail": self.detail, "gating": self.gating}


@dataclass
class RegionReport:
    checks: Dict[str, CheckResult]
    samples: int
    seed: int
    box: tuple
    alpha: float
    certified: bool

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values() if c.gating)

    def to_dict(self):
        return {"passed": self.passed, "samples": self.samples, "seed": self.seed,
                "box": [list(map(float, b)) for b in self.box], "alpha": self.alpha,
                "alpha_certified": self.certified,
                "checks": {k: v.to_dict() for k, v in self.checks.items()}}


def default_box(L: QuadraticLyapunov, sys: SwitchedSystem, count=DEFAULT_COUNT, seed=0):
    """x0 +- 5 |Delta| per axis, Delta the larger sphere-centre offset of the two modes."""
    shift = max(np.linalg.norm(L.P @ f(L.x0)) / L.alpha for f in (sys.minus, sys.plus))
    return SamplingSpec.around(L.x0, DEFAULT_BOX_FACTOR * shift, count, seed)


def _near(value, scale):
    return abs(value) <= BOUNDARY_EXCLUSION * (1.0 + scale)


def verify_lemmas(L: QuadraticLyapunov, sys: SwitchedSystem, eq: SwitchedEquilibrium,
                  rule: SwitchingRule, box: Optional[SamplingSpec] = None) -> RegionReport:
    """Sampled checks of the region lemmas for a linear rule.

    Gating checks:

    * ``L1-1``  every sample other than x0 lies in Omega- or Omega+;
    * ``L2-1``  H_i(x) < 0 implies V'(x) f_i(x) < 0 for both modes;
    * ``L2-2``  H_i(x0) = 0 for both modes;
    * ``L2-3``  the sphere formula matches the sign of H_i off the boundary and
      sampled sphere points have |H_i| <= 1e-9;
    * ``L2-4``  the rule normal is parallel to grad H_- (x0) and antiparallel
      to grad H_+ (x0);
    * ``L2-5``  s(x) < 0 implies x in Omega-_alpha and s(x) > 0 implies x in
      Omega+_alpha (the inclusion the stability argument relies on).

    ``L2-5-literal`` (Omega-_alpha inside {s < 0}) is recorded but not gating:
    an exterior-of-sphere set cannot fit in a half-space, so it fails on any
    box reaching past the far side of the sphere.
    """
    if not rule.is_linear:
        raise ContractViolation("verify_lemmas needs a linear rule")
    if box is None:
        box = default_box(L, sys)
    x0 = L.x0
    f0 = {-1: sys.minus(x0), 1: sys.plus(x0)}
    fields = {-1: sys.minus, 1: sys.plus}
    names = ["L1-1", "L2-1", "L2-2", "L2-3", "L2-4", "L2-5", "L2-5-literal"]
    checks = {k: CheckResult(k, True) for k in names}
    checks["L2-5-literal"].gating = False

    # exact checks at x0
    c = checks["L2-2"]
    for mode in (-1, 1):
        c.checked += 1
        if h_value(L, f0[mode], x0) != 0.0:
            c.fail(x0, f"H at x0 nonzero for mode {mode:+d}")

    c = checks["L2-4"]
    angles = []
    for mode, sgn in ((-1, 1.0), (1, -1.0)):
        g = h_gradient(L, f0[mode], x0)
        ang = angle_between(sgn * rule.normal, g)
        angles.append(ang)
        c.checked += 1
        if not ang <= TANGENCY_TOL:
            c.fail(x0, f"angle {ang:.3e} rad for mode {mode:+d}")
    c.detail = f"max angle {max(angles):.3e} rad"

    spheres = {m: omega_alpha_sphere(L, f0[m]) for m in (-1, 1)}
    c = checks["L2-3"]
    worst = 0.0
    for m, sph in spheres.items():
        for p in sph.boundary_points(256, seed=box.seed):
            hv = h_value(L, f0[m], p)
            worst = max(worst, abs(hv))
            c.checked += 1
            if abs(hv) > SPHERE_RESIDUAL_TOL:
                c.fail(p, f"boundary residual {hv:.3e} for mode {m:+d}")
    c.detail = f"max boundary residual {worst:.3e}"

    for x in box.points():
        d = x - x0
        if not np.any(d):
            continue
        sq = float(d @ d)
        s = rule.s(x)
        s_scale = float(np.abs(d) @ np.abs(rule.normal))
        rates, hs = {}, {}
        for m in (-1, 1):
            fx = fields[m](x)
            grad = 2.0 * L.P @ d
            rates[m] = float(grad @ fx)
            rate_scale = float(np.abs(grad) @ np.abs(fx))
            lin = float(grad @ f0[m])
            hs[m] = -L.alpha * sq + lin
            h_scale = L.alpha * sq + float(np.abs(grad) @ np.abs(f0[m]))
            rates[m, "near"] = _near(rates[m], rate_scale)
            hs[m, "near"] = _near(hs[m], h_scale)

        c = checks["L1-1"]
        if rates[-1, "near"] or rates[1, "near"]:
            c.excluded += 1
        else:
            c.checked += 1
            if not (rates[-1] < 0 or rates[1] < 0):
                c.fail(x, "V increases along both modes")

        c = checks["L2-1"]
        for m in (-1, 1):
            if hs[m, "near"] or rates[m, "near"]:
                c.excluded += 1
                continue
            c.checked += 1
            if hs[m] < 0 and not rates[m] < 0:
                c.fail(x, f"in Omega_alpha but not in Omega for mode {m:+d}")

        c = checks["L2-3"]
        for m, sph in spheres.items():
            if hs[m, "near"]:
                continue
            dist = np.linalg.norm(x - sph.center) - sph.radius
            if abs(dist) <= BOUNDARY_EXCLUSION * (1.0 + sph.radius):
                continue
            c.checked += 1
            if (hs[m] < 0) != (dist > 0):
                c.fail(x, f"sphere formula disagrees with H for mode {m:+d}")

        near_s = _near(s, s_scale)
        c = checks["L2-5"]
        if near_s or hs[-1, "near"] or hs[1, "near"]:
            c.excluded += 1
        else:
            c.checked += 1
            if s < 0 and not hs[-1] < 0:
                c.fail(x, "s < 0 outside Omega-_alpha")
            if s > 0 and not hs[1] < 0:
                c.fail(x, "s > 0 outside Omega+_alpha")

        c = checks["L2-5-literal"]
        if near_s or hs[-1, "near"] or hs[1, "near"]:
            c.excluded += 1
        else:
            c.checked += 1
            if hs[-1] < 0 and not s < 0:
                c.fail(x, "Omega-_alpha point with s >= 0")
            if hs[1] < 0 and not s > 0:
                c.fail(x, "Omega+_alpha point with s <= 0")

    return RegionReport(checks, box.count, box.seed, (box.lower, box.upper),
                        L.alpha, L.certified)
