import pytest

from asl.lab import CubeLab


@pytest.fixture(scope="session")
def lab2():
    return CubeLab.build(2)


@pytest.fixture(scope="session")
def lab3():
    return CubeLab.build(3)


@pytest.fixture(scope="session")
def lab4():
    return CubeLab.build(4)
