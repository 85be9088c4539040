from __future__ import annotations

import pytest

from fibergraphs.enumeration import enumerate_fiber
from fibergraphs.graphs import build_graph


def pytest_addoption(parser):
    parser.addoption(
        "--long",
        action="store_true",
        default=False,
        help="run the expensive instances (G(4,3) connectivity and full detour sweeps)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="needs --long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def graph_2_2():
    return build_graph(enumerate_fiber(2, 2))


@pytest.fixture(scope="session")
def graph_3_1():
    return build_graph(enumerate_fiber(3, 1))


@pytest.fixture(scope="session")
def graph_3_2():
    return build_graph(enumerate_fiber(3, 2))


@pytest.fixture(scope="session")
def graph_3_3():
    return build_graph(enumerate_fiber(3, 3))


@pytest.fixture(scope="session")
def graph_3_4():
    return build_graph(enumerate_fiber(3, 4))


@pytest.fixture(scope="session")
def graph_4_3():
    return build_graph(enumerate_fiber(4, 3))
