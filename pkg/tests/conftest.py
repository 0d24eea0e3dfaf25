from fractions import Fraction

import pytest

from twistdiff import Annulus, Endomorphism, LogNorm, Qp

P = 5


@pytest.fixture(scope="session")
def F():
    return Qp(P, 40)


@pytest.fixture(scope="session")
def R(F):
    return Annulus(F, LogNorm(0), LogNorm(-1))


@pytest.fixture(scope="session")
def disk(F):
    return Annulus(F, LogNorm(0), None)


@pytest.fixture(scope="session")
def sigma(F, R):
    """q = 1 + p^2, h = p^2 on 1/p <= |x| <= 1."""
    return Endomorphism(F(1 + P**2), F(P**2), R)


@pytest.fixture(scope="session")
def qmul(F, R):
    """σ(x) = q x with q = 1 + p^2."""
    return Endomorphism(F(1 + P**2), F(0), R)


@pytest.fixture(scope="session")
def ident(R):
    return Endomorphism.identity(R)


@pytest.fixture(scope="session")
def eta():
    return LogNorm(-2)


def L(x) -> LogNorm:
    return LogNorm(Fraction(x))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
