"""Closed-loop simulation of a two-mode switched system as a Filippov system.

Fixed-step classical RK4 inside each mode, bisection localization of surface
crossings, equivalent-control sliding on the surface, optional hysteresis
regularization, and a Lyapunov-descent monitor for simulated trajectories.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ContractViolation, Divergence, SwitchSurfError
from .lyapunov import QuadraticLyapunov
from .model import SwitchedSystem
from .rules import SwitchingRule

SLIDING = 0
MAX_BISECTIONS = 40
MAX_PROJECTIONS = 5
MONOTONE_RSLACK = 1e-8


@dataclass(frozen=True)
class SimOptions:
    step: float = 1e-2
    t_max: float = 10.0
    event_tol: float = 1e-10
    slide_tol: float = 1e-8
    hysteresis: float = 0.0
    stop_radius: Optional[float] = None

    def validate(self):
        if not self.step > 0:
            raise ContractViolation(f"step must be positive, got {self.step}")
        if not self.t_max >= 0:
            raise ContractViolation(f"t_max must be non-negative, got {self.t_max}")
        if not self.event_tol > 0 or not self.slide_tol > 0:
            raise ContractViolation("event_tol and slide_tol must be positive")
        if not self.hysteresis >= 0:
            raise ContractViolation("hysteresis must be non-negative")
        if self.stop_radius is not None and not self.stop_radius >= 0:
            raise ContractViolation("stop_radius must be non-negative")

    def resolved_stop_radius(self, x0):
        if self.stop_radius is not None:
            return float(self.stop_radius)
        return 1e-3 * (1.0 + float(np.linalg.norm(x0)))


@dataclass(frozen=True)
class Event:
    t: float
    kind: str


@dataclass
class Trajectory:
    """Samples ``(t, x, mode, V, s)``; mode is -1, +1 or 0 (= sliding)."""

    x0: np.ndarray
    rule_kind: str
    t: List[float] = field(default_factory=list)
    x: List[np.ndarray] = field(default_factory=list)
    mode: List[int] = field(default_factory=list)
    V: List[float] = field(default_factory=list)
    s: List[float] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)
    sliding_lambda: List[tuple] = field(default_factory=list)
    chattering: bool = False
    stop_radius: float = 0.0

    def __len__(self):
        return len(self.t)

    @property
    def states(self):
        return np.array(self.x)

    @property
    def final_state(self):
        return self.x[-1]

    @property
    def reached_stop(self):
        return any(e.kind == "stop" for e in self.events)

    def count(self, kind):
        return sum(1 for e in self.events if e.kind == kind)


def rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def sliding_lambda(normal, f_minus_val, f_plus_val):
    """Weight of ``f_minus`` in the tangent convex combination, or None.

    Sliding is attractive when ``<n, f+> < 0 < <n, f->`` under the contract
    that s > 0 selects ``f+``. Otherwise the surface is crossed and None is
    returned.
    """
    n = np.asarray(normal, dtype=float)
    gm = float(n @ f_minus_val)
    gp = float(n @ f_plus_val)
    if not (gp < 0.0 < gm):
        return None
    denom = gp - gm
    if denom == 0.0:
        raise SwitchSurfError("internal consistency error: attractive sliding with zero denominator")
    return gp / denom


def _filippov_field(sys, rule):
    def F(x):
        g = rule.gradient(x)
        fm, fp = sys.minus(x), sys.plus(x)
        gm, gp = g @ fm, g @ fp
        denom = gp - gm
        lam = gp / denom if denom != 0.0 else 0.5
        return lam * fm + (1.0 - lam) * fp
    return F


def _project(rule, x, tol):
    for _ in range(MAX_PROJECTIONS):
        s = rule.s(x)
        if abs(s) <= 0.5 * tol:
            break
        g = rule.gradient(x)
        x = x - s * g / (g @ g)
    return x


def _surface_mode(sys, rule, x, previous):
    """Mode to use from a point on the surface."""
    g = rule.gradient(x)
    gm = g @ sys.minus(x)
    gp = g @ sys.plus(x)
    if gp < 0.0 < gm:
        return SLIDING
    if gm >= 0.0 and gp >= 0.0:
        return 1
    if gm <= 0.0 and gp <= 0.0:
        return -1
    # repulsive surface: keep going the way we came
    return -previous if previous in (-1, 1) else 1


def simulate(sys: SwitchedSystem, rule: SwitchingRule, L: QuadraticLyapunov, x_init,
             opts: SimOptions = SimOptions()) -> Trajectory:
    """Integrate the closed loop from ``x_init`` until ``t_max`` or the stop radius."""
    opts.validate()
    x = np.array(x_init, dtype=float).reshape(-1)
    if x.size != sys.dim or not np.all(np.isfinite(x)):
        raise ContractViolation("x_init must be a finite vector of the system dimension")
    x0 = rule.x0
    stop_r = opts.resolved_stop_radius(x0)
    tol = opts.event_tol
    hyst = opts.hysteresis
    traj = Trajectory(x0=x0, rule_kind=rule.kind, stop_radius=stop_r,
                      chattering=hyst > 0)
    fields = {-1: sys.minus, 1: sys.plus, SLIDING: _filippov_field(sys, rule)}

    def record(t, x, mode):
        if traj.t and t <= traj.t[-1]:
            traj.x[-1], traj.mode[-1] = x, mode
            traj.V[-1], traj.s[-1] = L.value(x), rule.s(x)
            return
        traj.t.append(float(t))
        traj.x.append(x)
        traj.mode.append(mode)
        traj.V.append(L.value(x))
        traj.s.append(rule.s(x))
        if mode == SLIDING:
            g = rule.gradient(x)
            lam = sliding_lambda(g, sys.minus(x), sys.plus(x))
            if lam is not None:
                traj.sliding_lambda.append((float(t), lam))

    def stopped(t, x):
        if np.linalg.norm(x - x0) < stop_r:
            traj.events.append(Event(float(t), "stop"))
            return True
        return False

    def initial_mode(x):
        s = rule.s(x)
        if hyst > 0:
            return 1 if s >= 0 else -1
        if abs(s) > tol:
            return 1 if s > 0 else -1
        return _surface_mode(sys, rule, _project(rule, x, tol), 0)

    t = 0.0
    mode = initial_mode(x)
    if mode == SLIDING:
        x = _project(rule, x, tol)
        traj.events.append(Event(t, "slide_start"))
    record(t, x, mode)
    if stopped(t, x):
        return traj

    def check_finite(x):
        if not np.all(np.isfinite(x)):
            raise Divergence("divergence: non-finite state", traj)

    while t < opts.t_max:
        h = min(opts.step, opts.t_max - t)
        if h <= 0:
            break
        if mode == SLIDING:
            F = fields[SLIDING]

            def advance(tau):
                return _project(rule, rk4_step(F, x, tau), tol)

            def attractive(y):
                return sliding_lambda(rule.gradient(y), sys.minus(y), sys.plus(y)) is not None

            x_new = advance(h)
            check_finite(x_new)
            if attractive(x_new):
                x, t = x_new, t + h
                record(t, x, SLIDING)
            else:
                lo, hi = 0.0, h
                for _ in range(MAX_BISECTIONS):
                    mid = 0.5 * (lo + hi)
                    if attractive(advance(mid)):
                        lo = mid
                    else:
                        hi = mid
                x = advance(hi)
                t = t + hi
                mode = _surface_mode(sys, rule, x, 0)
                if mode == SLIDING:
                    mode = 1 if rule.s(x) >= 0 else -1
                traj.events.append(Event(t, "slide_end"))
                record(t, x, mode)
        else:
            f = fields[mode]
            threshold = -hyst

            def g(y):
                return mode * rule.s(y) - threshold

            x_new = rk4_step(f, x, h)
            check_finite(x_new)
            g_new = g(x_new)
            if g_new < -tol:
                lo, hi = 0.0, h
                y = x_new
                for _ in range(MAX_BISECTIONS):
                    mid = 0.5 * (lo + hi)
                    y = rk4_step(f, x, mid)
                    gm = g(y)
                    if abs(gm) <= tol:
                        hi = mid
                        break
                    if gm > 0:
                        lo = mid
                    else:
                        hi = mid
                else:
                    y = rk4_step(f, x, hi)
                x, t = y, t + hi
                record(t, x, mode)
                traj.events.append(Event(t, "crossing"))
                if hyst > 0:
                    mode = -mode
                else:
                    mode = _surface_mode(sys, rule, x, mode)
                    if mode == SLIDING:
                        x = _project(rule, x, tol)
                        traj.events.append(Event(t, "slide_start"))
                        record(t, x, SLIDING)
            else:
                x, t = x_new, t + h
                record(t, x, mode)
                if hyst == 0 and abs(rule.s(x)) <= tol:
                    new_mode = _surface_mode(sys, rule, x, mode)
                    if new_mode == SLIDING:
                        x = _project(rule, x, tol)
                        traj.events.append(Event(t, "slide_start"))
                        record(t, x, SLIDING)
                    mode = new_mode
        if stopped(t, x):
            break
    return traj


@dataclass
class DescentReport:
    monotone: bool
    max_uptick: float
    slack: float
    w_positive: bool
    w_min_estimate: float
    decay_bound_ok: bool
    reached_stop: bool
    t_stop: Optional[float]
    witnesses: list = field(default_factory=list)

    @property
    def passed(self):
        return self.monotone and self.w_positive and self.decay_bound_ok

    def to_dict(self):
        return {"monotone": self.monotone, "max_uptick": self.max_uptick, "slack": self.slack,
                "w_positive": self.w_positive, "w_min_estimate": self.w_min_estimate,
                "decay_bound_ok": self.decay_bound_ok, "reached_stop": self.reached_stop,
                "t_stop": self.t_stop, "witnesses": self.witnesses}


def descent_rate(L: QuadraticLyapunov, sys: SwitchedSystem, x, mode):
    """Pointwise ``w(x)``: minus the Lyapunov derivative of the active mode,
    and on the surface minus the larger of the two mode derivatives."""
    dm = L.derivative(x, sys.minus(x))
    dp = L.derivative(x, sys.plus(x))
    if mode == -1:
        return -dm
    if mode == 1:
        return -dp
    return -max(dm, dp)


def descent_monitor(traj: Trajectory, L: QuadraticLyapunov, sys: SwitchedSystem,
                    rule: SwitchingRule) -> DescentReport:
    """Check monotone decrease of ``v(t) = V(x(t))``, positivity of ``w`` outside the stop radius,
    and the linear decay bound ``v(t) <= v(0) - w_min t`` before the stop radius."""
    scale = 1.0 + float(np.abs(L.x0).max())
    if (not np.allclose(rule.x0, L.x0, rtol=0, atol=1e-12 * scale)
            or not np.allclose(traj.x0, L.x0, rtol=0, atol=1e-12 * scale)
            or traj.rule_kind != rule.kind):
        raise ContractViolation("trajectory, rule and Lyapunov function do not match")
    v = np.array(traj.V)
    slack = MONOTONE_RSLACK * (1.0 + v[0])
    upticks = np.diff(v)
    max_uptick = float(max(upticks.max(initial=0.0), 0.0))
    witnesses = []
    monotone = max_uptick <= slack
    if not monotone:
        k = int(np.argmax(upticks))
        witnesses.append({"check": "monotone", "t": traj.t[k + 1], "x": traj.x[k + 1].tolist()})

    w = np.array([descent_rate(L, sys, x, m) for x, m in zip(traj.x, traj.mode)])
    dist = np.array([np.linalg.norm(x - L.x0) for x in traj.x])
    # inside the stop radius the run has ended; samples there only carry
    # event-tolerance noise of order tol * |grad V|
    off = (dist > 0) & (dist >= traj.stop_radius)
    bad = np.flatnonzero(off & ~(w > 0))
    w_positive = bad.size == 0
    for k in bad[:5]:
        witnesses.append({"check": "w_positive", "t": traj.t[k], "x": traj.x[k].tolist(),
                          "w": float(w[k])})

    annulus = dist >= traj.stop_radius
    w_min = float(w[annulus].min()) if np.any(annulus) else 0.0
    t = np.array(traj.t)
    bound = v[0] - max(w_min, 0.0) * t + slack
    decay_ok = bool(np.all(v[annulus] <= bound[annulus]))
    t_stop = next((e.t for e in traj.events if e.kind == "stop"), None)
    return DescentReport(bool(monotone), max_uptick, float(slack), bool(w_positive), w_min,
                         decay_ok, traj.reached_stop, t_stop, witnesses)


def write_trajectory_csv(traj: Trajectory, path):
    """Columns ``t, x1..xn, mode, V, s``; events follow as ``#event,t,kind`` lines.

    ``mode`` is -1, 1, or 0 for sliding.
    """
    n = traj.x0.size
    header = ",".join(["t"] + [f"x{i + 1}" for i in range(n)] + ["mode", "V", "s"])
    lines = [header]
    for t, x, m, V, s in zip(traj.t, traj.x, traj.mode, traj.V, traj.s):
        cols = [repr(float(t))] + [repr(float(v)) for v in x] + [str(m), repr(V), repr(s)]
        lines.append(",".join(cols))
    for e in traj.events:
        lines.append(f"#event,{e.t!r},{e.kind}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path):
    """Inverse of :func:`write_trajectory_csv`; returns (rows array, events)."""
    rows, events = [], []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            line = line.strip()
            if line.startswith("#event"):
                _, t, kind = line.split(",")
                events.append(Event(float(t), kind))
            elif line:
                rows.append([float(v) for v in line.split(",")])
    return header, np.array(rows), events
