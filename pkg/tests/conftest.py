import pytest

from qmlab import Grid, aarnes, dirac, three_point
from qmlab.families import standard_family


@pytest.fixture(scope="session")
def g65():
    return Grid(65)


@pytest.fixture(scope="session")
def g33():
    return Grid(33)


@pytest.fixture(scope="session")
def g9():
    return Grid(9)


@pytest.fixture(scope="session")
def measures65(g65):
    return {"aarnes": aarnes(g65), "three_point": three_point(g65), "dirac": dirac(g65, g65.center)}


@pytest.fixture(scope="session")
def family65(g65):
    return standard_family(g65, seed=0)


@pytest.fixture(scope="session")
def family33(g33):
    return standard_family(g33, seed=0)
