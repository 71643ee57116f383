"""DC-DC boost converter: model, closed-form switched equilibria, the
diagonal Lyapunov function, both switching rules, and the comparison demo.

State: x1 = inductor current, x2 = capacitor voltage. Switch state 0 is the
"-" mode and switch state 1 is the "+" mode. With the switch closed the
capacitor ESR ``r_C`` also loads the inductor branch, giving the
``-r0 r_C / (r0 + r_C)`` term in the (1, 1) entry of the "+" matrix.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ContractViolation, DegenerateError, NoSwitchedEquilibrium
from .filippov import DescentReport, SimOptions, Trajectory, descent_monitor, simulate
from .geometry import SphereRegion, omega_alpha_sphere
from .lyapunov import QuadraticLyapunov, verify_cqlf
from .model import SwitchedEquilibrium, SwitchedSystem
from .rules import SwitchingRule, linear_rule, quadratic_rule

REPORTED_LAMBDA0 = 0.367


@dataclass(frozen=True)
class BoostParams:
    r_L: float = 20.0
    r_C: float = 5.0
    x_L: float = 600.0
    x_C: float = 70.0
    r_0: float = 200.0
    u_s: float = 8.0

    def __post_init__(self):
        for name in ("r_L", "r_C", "x_L", "x_C", "r_0", "u_s"):
            if not getattr(self, name) > 0:
                raise ContractViolation(f"{name} must be strictly positive")


@dataclass(frozen=True)
class BoostModel:
    params: BoostParams
    A_minus: np.ndarray
    A_plus: np.ndarray
    b: np.ndarray
    system: SwitchedSystem


def boost_matrix(p: BoostParams, switch: int):
    if switch not in (0, 1):
        raise ContractViolation("switch state must be 0 or 1")
    r = p.r_0 + p.r_C
    return np.array([
        [-(p.r_L + switch * p.r_0 * p.r_C / r) / p.x_L, -switch * p.r_0 / (p.x_L * r)],
        [switch * p.r_0 / (p.x_C * r), -1.0 / (p.x_C * r)],
    ])


def boost_system(p: BoostParams = BoostParams()) -> BoostModel:
    A0, A1 = boost_matrix(p, 0), boost_matrix(p, 1)
    b = np.array([p.u_s / p.x_L, 0.0])
    return BoostModel(p, A0, A1, b, SwitchedSystem.affine(A0, b, A1, b))


def equilibrium_quadratic(p: BoostParams, x02: float):
    """Coefficients ``(a, b, c)`` of ``a x01^2 + b x01 + c = 0``.

    Obtained by substituting ``1 - lam0 = x02 / (r0 x01)`` from the voltage
    equation into the current equation.
    """
    r = p.r_0 + p.r_C
    return p.r_L, -(p.u_s - x02 * p.r_C / r), x02 ** 2 / r


def boost_equilibria(p: BoostParams, x02: float) -> List[SwitchedEquilibrium]:
    """All switched equilibria with voltage ``x02``, sorted by current."""
    if not x02 > 0:
        raise ContractViolation("reference voltage must be positive")
    a, b, c = equilibrium_quadratic(p, x02)
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise NoSwitchedEquilibrium(f"no switched equilibrium at this reference voltage ({x02})")
    sq = math.sqrt(disc)
    # cancellation-free pair of roots
    q = -0.5 * (b + math.copysign(sq, b))
    roots = sorted({q / a, c / q} if q != 0 else {0.0})
    sys = boost_system(p).system
    out = []
    for x01 in roots:
        if x01 <= 0:
            continue
        lam = 1.0 - x02 / (p.r_0 * x01)
        if not 0.0 <= lam <= 1.0:
            continue
        eq = SwitchedEquilibrium(np.array([x01, x02]), lam)
        if not eq.residual_ok(sys):
            raise NoSwitchedEquilibrium("closed-form root failed the residual check")
        out.append(eq)
    if not out:
        raise NoSwitchedEquilibrium(f"no switched equilibrium at this reference voltage ({x02})")
    return out


def select_equilibrium(eqs: List[SwitchedEquilibrium]) -> SwitchedEquilibrium:
    """The root with the smaller current (weight close to 0.367 for the
    reference parameters)."""
    return min(eqs, key=lambda e: e.x0[0])


def boost_lyapunov(p: BoostParams, eq: SwitchedEquilibrium) -> QuadraticLyapunov:
    """``V = (x1 - x01)^2 / (2 x_C) + (x2 - x02)^2 / (2 x_L)``, alpha certified."""
    P = np.diag([1.0 / (2.0 * p.x_C), 1.0 / (2.0 * p.x_L)])
    check = verify_cqlf(boost_system(p).system, eq, P)
    return QuadraticLyapunov(P, eq.x0, check.alpha, True, "boost")


def closed_form_alpha(p: BoostParams):
    return min(p.r_L / (p.x_L * p.x_C), 1.0 / (p.x_L * p.x_C * (p.r_0 + p.r_C)))


def expanded_normal(p: BoostParams, eq: SwitchedEquilibrium):
    """``V''(x0) f_minus(x0)`` written out for the boost model."""
    x01, x02 = eq.x0
    return np.array([
        (1.0 / p.x_C) * (-p.r_L * x01 + p.u_s) / p.x_L,
        -x02 / (p.x_L * p.x_C * (p.r_0 + p.r_C)),
    ])


def spi_threshold(p: BoostParams, eq: SwitchedEquilibrium):
    """The printed simplified quadratic threshold as a callable."""
    x01, x02 = eq.x0

    def s(x):
        x1, x2 = x
        return p.r_L * p.r_C * x1 ** 2 - (x01 * p.r_L * p.r_C - x02) * x1 - x01 * x2
    return s


def derived_spi_threshold(p: BoostParams, eq: SwitchedEquilibrium):
    """Positive multiple of the quadratic rule for the boost model.

    ``s_quad(x) = r0 / ((r0 + r_C) x_L x_C) * (r_C x1^2 - (x01 r_C - x02) x1 - x01 x2)``.
    """
    x01, x02 = eq.x0

    def s(x):
        x1, x2 = x
        return p.r_C * x1 ** 2 - (x01 * p.r_C - x02) * x1 - x01 * x2
    return s


def switch_state(rule: SwitchingRule, x):
    """Switch position 1/0 from the rule sign (+ mode is switch closed)."""
    sg = rule.sigma(x)
    return {1: 1, -1: 0}.get(sg)


def boost_rules(p: BoostParams, eq: SwitchedEquilibrium, L: QuadraticLyapunov):
    if not 0.0 < eq.lambda0 < 1.0:
        raise DegenerateError("degenerate equilibrium: weight must lie strictly inside (0, 1)")
    sys = boost_system(p).system
    return linear_rule(L, sys, eq), quadratic_rule(L, sys)


@dataclass
class SignAgreement:
    points: int
    agree: int
    mismatches: list

    @property
    def fraction(self):
        return self.agree / self.points if self.points else 1.0


def sign_agreement(s_a, s_b, points, max_witnesses=5) -> SignAgreement:
    agree, bad = 0, []
    for x in points:
        if np.sign(s_a(x)) == np.sign(s_b(x)):
            agree += 1
        elif len(bad) < max_witnesses:
            bad.append(np.asarray(x, dtype=float).tolist())
    return SignAgreement(len(points), agree, bad)


def demo_points(count=1000, seed=0):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(0.0, 1.0, count), rng.uniform(0.0, 20.0, count)])


def boost_demo_options(p: BoostParams = BoostParams()) -> SimOptions:
    """Step well below the fastest time constant; horizon many times the slow
    sliding time constant (~1.1e4 for the reference parameters)."""
    return SimOptions(step=2.0, t_max=4.0e5, event_tol=1e-15, slide_tol=1e-8,
                      hysteresis=0.0, stop_radius=1e-3)


@dataclass
class BoostDemo:
    params: BoostParams
    equilibrium: SwitchedEquilibrium
    lyapunov: QuadraticLyapunov
    rules: dict
    trajectories: dict
    reports: dict
    spheres: dict

    def to_dict(self):
        return {
            "params": self.params.__dict__,
            "equilibrium": {"x0": self.equilibrium.x0.tolist(),
                            "lambda0": self.equilibrium.lambda0},
            "P": self.lyapunov.P.tolist(), "alpha": self.lyapunov.alpha,
            "rules": {k: r.to_dict() for k, r in self.rules.items()},
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
            "final_states": {k: t.final_state.tolist() for k, t in self.trajectories.items()},
            "spheres": {k: {"center": s.center.tolist(), "radius": s.radius}
                        for k, s in self.spheres.items()},
        }


def worker_count(default=2):
    try:
        return max(1, int(os.environ.get("SWITCHSURF_THREADS", default)))
    except ValueError:
        return default


def boost_demo(p: BoostParams = BoostParams(), x02: float = 10.0, opts: SimOptions = None,
               root: int = None) -> BoostDemo:
    """Run the linear and the quadratic closed loop from the origin."""
    opts = opts or boost_demo_options(p)
    eqs = boost_equilibria(p, x02)
    eq = select_equilibrium(eqs) if root is None else eqs[root]
    L = boost_lyapunov(p, eq)
    lin, quad = boost_rules(p, eq, L)
    sys = boost_system(p).system
    rules = {"linear": lin, "quadratic": quad}
    x_init = np.zeros(2)

    def run(name):
        traj = simulate(sys, rules[name], L, x_init, opts)
        return name, traj, descent_monitor(traj, L, sys, rules[name])

    with ThreadPoolExecutor(max_workers=min(2, worker_count())) as pool:
        results = list(pool.map(run, ["linear", "quadratic"]))
    trajs = {name: tr for name, tr, _ in results}
    reports = {name: rep for name, _, rep in results}
    spheres = {"minus": omega_alpha_sphere(L, sys.minus(eq.x0)),
               "plus": omega_alpha_sphere(L, sys.plus(eq.x0))}
    return BoostDemo(p, eq, L, rules, trajs, reports, spheres)
