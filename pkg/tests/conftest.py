from importlib import resources

import pytest

from scforge.dsl import parse_network
from scforge.transform import transform_all


def fixture_text(name: str) -> str:
    return (resources.files("scforge") / "fixtures" / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def two_charts():
    return parse_network(fixture_text("two_charts.scn"))


@pytest.fixture(scope="session")
def cardiac():
    return parse_network(fixture_text("cardiac.scn"))


@pytest.fixture(scope="session")
def cardiac_mutated():
    return parse_network(fixture_text("cardiac_mutated.scn"))


@pytest.fixture(scope="session")
def two_charts_ta(two_charts):
    return transform_all(two_charts)
