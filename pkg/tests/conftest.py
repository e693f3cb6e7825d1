import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from bratteli import load_diagram

_FIXTURES = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         "fixtures")


def fixture_path(name):
    return os.path.join(_FIXTURES, name)


@pytest.fixture(scope="session")
def ex57():
    return load_diagram(fixture_path("example-5-7.json"))


@pytest.fixture(scope="session")
def ex57_unordered():
    return load_diagram(fixture_path("example-5-7-unordered.json"))


@pytest.fixture(scope="session")
def ex82():
    return load_diagram(fixture_path("example-8-2.json"))


@pytest.fixture(scope="session")
def five_vertex():
    return load_diagram(fixture_path("five-vertex.json"))


@pytest.fixture(scope="session")
def odometer():
    return load_diagram(fixture_path("odometer.json"))


@pytest.fixture(scope="session")
def two_odometers():
    return load_diagram(fixture_path("two-odometers.json"))


@pytest.fixture(scope="session")
def fuzz_corpus():
    from fuzzgen import corpus
    return corpus()
