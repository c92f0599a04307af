import pytest

from mvnabs import fixtures


@pytest.fixture
def pl2():
    return fixtures.pl2()


@pytest.fixture
def apl2():
    return fixtures.apl2()


@pytest.fixture
def rho_cro():
    return fixtures.rho_cro()


@pytest.fixture
def mtrp():
    return fixtures.mtrp()


@pytest.fixture
def atrp():
    return fixtures.atrp()


@pytest.fixture
def phi_trp():
    return fixtures.phi_trp()
