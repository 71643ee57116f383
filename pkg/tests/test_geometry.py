import numpy as np
import pytest

from switchsurf.errors import DegenerateError
from switchsurf.geometry import (h_value, omega_alpha_membership, omega_alpha_sphere,
                                 omega_membership, verify_lemmas)
from switchsurf.lyapunov import QuadraticLyapunov, SamplingSpec, verify_cqlf
from switchsurf.model import AffineField, SwitchedSystem, find_switched_equilibrium
from switchsurf.rules import linear_rule


def test_omega_membership_basic():
    L = QuadraticLyapunov(np.eye(2), [0, 0], 2.0)
    f = AffineField(-np.eye(2), [0, 0])
    assert not omega_membership(L, f, [0, 0])
    assert omega_membership(L, f, [0.3, -2])


def test_omega_membership_boost_origin(boost_setup):
    L, sys = boost_setup["L"], boost_setup["sys"]
    x = np.zeros(2)
    for f in (sys.minus, sys.plus):
        direct = (2 * L.P @ (x - L.x0)) @ f(x)
        assert omega_membership(L, f, x) == (direct < 0)


def test_omega_alpha_membership_basic():
    L = QuadraticLyapunov(np.eye(2), [0, 0], 2.0)
    f0 = np.array([2.0, 0.0])
    assert not omega_alpha_membership(L, f0, [0, 0])
    assert omega_alpha_membership(L, f0, [100, 100])
    assert h_value(L, f0, [0, 0]) == 0


def test_sphere_example():
    L = QuadraticLyapunov(np.eye(2), [0, 0], 2.0)
    sph = omega_alpha_sphere(L, [2.0, 0.0])
    np.testing.assert_array_equal(sph.center, [1, 0])
    assert sph.radius == 1.0 and sph.side == "exterior"
    assert np.linalg.norm(L.x0 - sph.center) == sph.radius
    for p in sph.boundary_points(64):
        assert abs(h_value(L, [2.0, 0.0], p)) <= 1e-12


def test_sphere_degenerate():
    with pytest.raises(DegenerateError):
        omega_alpha_sphere(QuadraticLyapunov(np.eye(2), [0, 0], 1.0), [0.0, 0.0])


def test_sphere_matches_membership(rng):
    B = rng.standard_normal((3, 3))
    L = QuadraticLyapunov(B @ B.T + np.eye(3), rng.standard_normal(3), 0.7)
    f0 = rng.standard_normal(3)
    sph = omega_alpha_sphere(L, f0)
    assert np.linalg.norm(L.x0 - sph.center) == pytest.approx(sph.radius, rel=1e-12)
    for x in sph.center + rng.uniform(-3, 3, (1000, 3)) * sph.radius:
        if abs(np.linalg.norm(x - sph.center) - sph.radius) > 1e-9 * sph.radius:
            assert omega_alpha_membership(L, f0, x) == sph.contains(x)


def test_boost_sphere_boundary(boost_setup):
    L, sys = boost_setup["L"], boost_setup["sys"]
    for f in (sys.minus, sys.plus):
        f0 = f(L.x0)
        sph = omega_alpha_sphere(L, f0)
        for p in sph.boundary_points(256):
            assert abs(h_value(L, f0, p)) <= 1e-9


def test_lemmas_boost(boost_setup):
    b = boost_setup
    rep = verify_lemmas(b["L"], b["sys"], b["eq"], b["lin"])
    for name in ("L1-1", "L2-1", "L2-2", "L2-3", "L2-4", "L2-5"):
        assert rep.checks[name].passed, (name, rep.checks[name].witnesses)
    assert rep.passed
    # the half-space inclusion read literally does not hold on this box
    literal = rep.checks["L2-5-literal"]
    assert not literal.gating and not literal.passed and literal.witnesses


def test_lemmas_negative_control_inflated_alpha(boost_setup):
    b = boost_setup
    box = SamplingSpec.around(b["eq"].x0, [0.05, 10.0], 10_000, 0)
    rep = verify_lemmas(b["L"].with_alpha(10 * b["L"].alpha), b["sys"], b["eq"], b["lin"], box)
    c = rep.checks["L2-1"]
    assert not c.passed and c.witnesses
    assert not rep.passed
    # same box with the certified alpha passes
    assert verify_lemmas(b["L"], b["sys"], b["eq"], b["lin"], box).passed


def test_lemmas_equal_matrices_case():
    sys = SwitchedSystem.affine(-np.eye(2), [1, 0], -np.eye(2), [-1, 0])
    eq = find_switched_equilibrium(sys, [0.0, 0.0], 0.5, pin=0)
    alpha = verify_cqlf(sys, eq, np.eye(2)).alpha
    L = QuadraticLyapunov(np.eye(2), eq.x0, alpha)
    rep = verify_lemmas(L, sys, eq, linear_rule(L, sys, eq))
    assert rep.checks["L2-5"].passed and rep.passed


def test_lemmas_three_dimensional_common_P():
    rng = np.random.default_rng(11)
    mats = []
    for _ in range(2):
        S, K = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        mats.append(-(S @ S.T) - 0.5 * np.eye(3) + (K - K.T))
    x_star = rng.standard_normal(3)
    d = rng.standard_normal(3)
    sys = SwitchedSystem.affine(mats[0], -mats[0] @ x_star + d, mats[1], -mats[1] @ x_star - d)
    eq = find_switched_equilibrium(sys, x_star, 0.5, pin=2)
    alpha = verify_cqlf(sys, eq, np.eye(3)).alpha
    L = QuadraticLyapunov(np.eye(3), eq.x0, alpha)
    rep = verify_lemmas(L, sys, eq, linear_rule(L, sys, eq), None)
    assert rep.passed, {k: c.witnesses for k, c in rep.checks.items() if not c.passed}


def test_report_serializes(boost_setup):
    b = boost_setup
    box = SamplingSpec.around(b["eq"].x0, [0.05, 10.0], 200, 0)
    d = verify_lemmas(b["L"], b["sys"], b["eq"], b["lin"], box).to_dict()
    assert d["samples"] == 200 and d["seed"] == 0 and set(d["checks"]) >= {"L1-1", "L2-5"}
