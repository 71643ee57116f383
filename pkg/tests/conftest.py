import numpy as np
import pytest

from switchsurf import boost as bst

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def boost_setup():
    p = bst.BoostParams()
    model = bst.boost_system(p)
    eqs = bst.boost_equilibria(p, 10.0)
    eq = bst.select_equilibrium(eqs)
    L = bst.boost_lyapunov(p, eq)
    lin, quad = bst.boost_rules(p, eq, L)
    return dict(p=p, model=model, sys=model.system, eqs=eqs, eq=eq, L=L, lin=lin, quad=quad)


@pytest.fixture(scope="session")
def boost_demo_run():
    import time
    t0 = time.perf_counter()
    demo = bst.boost_demo(bst.BoostParams(), 10.0)
    return demo, time.perf_counter() - t0


@pytest.fixture
def acceptance_line():
    def record(number, passed, text):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
