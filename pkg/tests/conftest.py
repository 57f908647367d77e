import os

import pytest

from thermoflow import (
    MetricGraph,
    Roof,
    Sft,
    Suspension,
)

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


@pytest.fixture(scope="session")
def full2():
    return Sft([[1, 1], [1, 1]])


@pytest.fixture(scope="session")
def golden():
    return Sft([[1, 1], [1, 0]])


@pytest.fixture(scope="session")
def golden12(golden):
    return Suspension(golden, Roof([1.0, 2.0]))


@pytest.fixture(scope="session")
def full2_unit(full2):
    return Suspension(full2, Roof([1.0, 1.0]))


@pytest.fixture(scope="session")
def rose2():
    return MetricGraph(1, [(0, 0, 1), (0, 0, 1)])


@pytest.fixture(scope="session")
def theta():
    from fractions import Fraction
    return MetricGraph(2, [(0, 1, 1), (0, 1, Fraction(3, 2)), (0, 1, 2)])
