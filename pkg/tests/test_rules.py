import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchsurf.errors import DegenerateError
from switchsurf.lyapunov import QuadraticLyapunov
from switchsurf.model import SwitchedEquilibrium, SwitchedSystem, find_switched_equilibrium
from switchsurf.rules import linear_rule, quadratic_rule, reduced_rule


def toy():
    sys = SwitchedSystem.affine(-np.eye(2), [1, 0], -np.eye(2), [-1, 0])
    eq = find_switched_equilibrium(sys, [0.0, 0.0], 0.5, pin=0)
    return sys, eq, QuadraticLyapunov(np.eye(2), eq.x0, 2.0)


def test_quadratic_rule_toy_is_four_x1(rng):
    sys, eq, L = toy()
    q = quadratic_rule(L, sys)
    assert q.s(eq.x0) == 0
    for x in rng.standard_normal((50, 2)):
        assert q.s(x) == pytest.approx(4 * x[0], abs=1e-12)
    assert q.formula() == "+4*x1"


def test_linear_rule_toy():
    sys, eq, L = toy()
    lin = linear_rule(L, sys, eq)
    np.testing.assert_array_equal(lin.normal, [2, 0])
    assert lin.s([3.0, 5.0]) == 6.0
    assert lin.s(eq.x0) == 0.0
    np.testing.assert_array_equal(lin.diff_normal, [4, 0])


def test_reduced_rule_toy():
    _, _, L = toy()
    r = reduced_rule(L, [1, 0], [-1, 0])
    np.testing.assert_array_equal(r.normal, [4, 0])
    with pytest.raises(DegenerateError):
        reduced_rule(L, [1, 0], [1, 0])


def test_linear_rule_degenerate_when_minus_mode_rests_at_x0():
    sys = SwitchedSystem.affine(-np.eye(2), [0, 0], -np.eye(2), [1, 0])
    eq = SwitchedEquilibrium(np.zeros(2), 1.0)
    L = QuadraticLyapunov(np.eye(2), np.zeros(2), 2.0)
    with pytest.raises(DegenerateError, match="true equilibrium of mode -"):
        linear_rule(L, sys, eq)


def random_case(seed, equal_matrices=False):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((2, 2))
    A_m = -(S @ S.T) - 0.5 * np.eye(2) + 0.5 * (lambda K: K - K.T)(rng.standard_normal((2, 2)))
    A_p = A_m if equal_matrices else A_m + 0.3 * rng.standard_normal((2, 2))
    x_star = rng.standard_normal(2)
    d = rng.standard_normal(2)
    sys = SwitchedSystem.affine(A_m, -A_m @ x_star + d, A_p, -A_p @ x_star - d)
    eq = find_switched_equilibrium(sys, x_star, 0.5, pin=0)
    B = rng.standard_normal((2, 2))
    P = B @ B.T + np.eye(2)
    return rng, sys, eq, QuadraticLyapunov(P, eq.x0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_every_rule_vanishes_at_x0(seed):
    _, sys, eq, L = random_case(seed)
    assert quadratic_rule(L, sys).s(eq.x0) == pytest.approx(0, abs=1e-12)
    if 0 < eq.lambda0 < 1:
        assert linear_rule(L, sys, eq).s(eq.x0) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_linear_rule_sign_matches_plus_orientation(seed):
    rng, sys, eq, L = random_case(seed)
    if not 0 < eq.lambda0 < 1:
        return
    lin = linear_rule(L, sys, eq)
    n_plus = 2 * L.P @ sys.plus(eq.x0)
    for x in rng.uniform(-5, 5, (200, 2)):
        a, b = lin.s(x), (x - eq.x0) @ n_plus
        if a != 0 and b != 0:
            assert np.sign(a) == -np.sign(b)
        assert np.sign(a) == np.sign((x - eq.x0) @ lin.diff_normal) or abs(a) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100))
def test_scaling_P_keeps_sigma(seed, c):
    rng, sys, eq, L = random_case(seed)
    Lc = QuadraticLyapunov(c * L.P, L.x0, 1.0)
    rules = [(quadratic_rule(L, sys), quadratic_rule(Lc, sys))]
    rules.append((reduced_rule(L, sys.minus.b, sys.plus.b), reduced_rule(Lc, sys.minus.b, sys.plus.b)))
    if 0 < eq.lambda0 < 1:
        rules.append((linear_rule(L, sys, eq), linear_rule(Lc, sys, eq)))
    for x in rng.uniform(-5, 5, (100, 2)):
        for r1, r2 in rules:
            if abs(r1.s(x)) > 1e-9:
                assert r1.sigma(x) == r2.sigma(x)


@pytest.mark.parametrize("seed", range(10))
def test_equal_matrices_quadratic_equals_reduced(seed):
    rng, sys, eq, L = random_case(seed, equal_matrices=True)
    q = quadratic_rule(L, sys)
    r = reduced_rule(L, sys.minus.b, sys.plus.b)
    for x in rng.uniform(-5, 5, (200, 2)):
        assert q.s(x) == pytest.approx(r.s(x), rel=1e-12, abs=1e-12)


def test_mode_selection_contract():
    # sigma = +1 must pick the mode with the smaller Lyapunov derivative
    _, sys, eq, L = random_case(7)
    q = quadratic_rule(L, sys)
    rng = np.random.default_rng(0)
    for x in rng.uniform(-5, 5, (200, 2)):
        dm, dp = L.derivative(x, sys.minus(x)), L.derivative(x, sys.plus(x))
        if dm != dp:
            assert q.sigma(x) == (1 if dp < dm else -1)


def test_quadratic_closed_form_matches_callable(rng):
    _, sys, eq, L = random_case(3)
    q = quadratic_rule(L, sys)
    for x in rng.uniform(-5, 5, (100, 2)):
        assert q.form(x) == pytest.approx(q.s(x), rel=1e-10, abs=1e-10)
        np.testing.assert_allclose(q.form.gradient(x), q.gradient(x), rtol=1e-10, atol=1e-10)


def test_negated_rule_flips_sigma(rng):
    sys, eq, L = toy()
    lin = linear_rule(L, sys, eq)
    q = quadratic_rule(L, sys)
    for x in rng.standard_normal((20, 2)):
        assert lin.negated().sigma(x) == -lin.sigma(x)
        assert q.negated().sigma(x) == -q.sigma(x)


def test_serialization():
    sys, eq, L = toy()
    d = linear_rule(L, sys, eq).to_dict()
    assert d["kind"] == "linear" and d["normal"] == [2.0, 0.0] and d["formula"] == "+2*x1"
