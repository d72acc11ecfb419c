import pytest

from polynum import ModulusContext, NumberSystem, make_number_system, parse_poly


@pytest.fixture(scope="session")
def twin():
    """(X^2+2X+2, {0,1}): the twin-dragon system used throughout."""
    return NumberSystem("2,2,1", [0, 1])


@pytest.fixture(scope="session")
def b2():
    """(X+2, {0,1}): base -2."""
    return NumberSystem("2,1", [0, 1])


@pytest.fixture(scope="session")
def ns10():
    """(X+10, {0..9}): base -10, used for the decimal moment examples."""
    return make_number_system("10,1", range(10), verify=False)


@pytest.fixture(scope="session")
def cubic_ctx():
    """(X+2)(X^2+2X+2): one real root and a conjugate pair."""
    return ModulusContext(parse_poly("4,6,4,1"))
