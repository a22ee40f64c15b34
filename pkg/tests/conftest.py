import json
from functools import lru_cache

import pytest

from ivytree import fixture_path
from ivytree.compiler import compile_treemap
from ivytree.documents import parse_biset
from ivytree.ivyengine import ExploreConfig, explore, make_node

TREEMAPS = ("basilica", "rabbit", "capture_sqrt2")
FIXTURES = TREEMAPS + ("chebyshev_capture",)


def load_fixture(name):
    suffix = "biset" if name == "chebyshev_capture" else "treemap"
    with fixture_path(f"{name}.{suffix}.json").open(encoding="utf-8") as fh:
        return json.load(fh)


@lru_cache(maxsize=None)
def compiled(name):
    return compile_treemap(load_fixture(name))


def start_node(name):
    if name in TREEMAPS:
        c = compiled(name)
        return make_node(c.recursion, c.tree)
    return make_node(*parse_biset(load_fixture(name)))


@lru_cache(maxsize=None)
def explored(name):
    return explore(start_node(name), ExploreConfig())


@pytest.fixture
def group_ab():
    from ivytree.freegroup import FreeGroup

    return FreeGroup(["a", "b"])
