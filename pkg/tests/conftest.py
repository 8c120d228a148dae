from fractions import Fraction

import pytest

from bvkit.model import (
    FunctionModel,
    PolynomialPiece,
    XSinPiece,
    build_cantor_iterate,
    build_identity,
    build_zigzag,
)


@pytest.fixture(scope="session")
def identity():
    return build_identity()


@pytest.fixture(scope="session")
def zigzag():
    return build_zigzag()


@pytest.fixture(scope="session")
def cantor2():
    return build_cantor_iterate(2)


@pytest.fixture(scope="session")
def square01():
    return FunctionModel([PolynomialPiece(0, 1, [0, 0, 1])], name="square")


@pytest.fixture(scope="session")
def square_sym():
    return FunctionModel([PolynomialPiece(-1, 1, [0, 0, 1])], name="square_sym")


@pytest.fixture(scope="session")
def cubic():
    return FunctionModel([PolynomialPiece(-1, 1, [0, 0, 0, 1])], name="cubic")


@pytest.fixture(scope="session")
def xsin():
    return FunctionModel([XSinPiece(0.1, 1.0, 1)], name="xsin")


def F(num, den=1):
    return Fraction(num, den)
