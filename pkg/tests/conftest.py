import sys
import pytest
from hypothesis import settings, HealthCheck

from jetvessiot import corpus
from jetvessiot.exprparse import parse_expr
from jetvessiot.jet import Chart
from jetvessiot.system import ImplicitSystem

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def wave():
    return corpus.wave()


@pytest.fixture
def wave_r1():
    return corpus.wave_r1()


@pytest.fixture(scope="session")
def five_var():
    return corpus.five_var()


@pytest.fixture
def uxx_uyy():
    return corpus.uxx_uyy()


@pytest.fixture
def uxy():
    return corpus.uxy()


@pytest.fixture
def ode_circle():
    ch = Chart(["x"], ["u"], 1)
    return ImplicitSystem(ch, [parse_expr("u_x^2 + u^2 + x^2 - 1", ch)], "ode_circle")


@pytest.fixture(scope="session")
def random_systems():
    """The randomized corpus shared by the property suites (n, m <= 3)."""
    return corpus.random_corpus(150, seed=2024)


def jets(ch, *names):
    return [parse_expr(nm, ch) for nm in names]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(results):
        terminalreporter.write_line(results[label])
