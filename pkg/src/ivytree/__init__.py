"""Symbolic spanning trees of quadratic Thurston maps: bisets, tree compilation, ivy exploration."""

from importlib import resources

from .errors import ConsistencyError, InputError

__all__ = ["ConsistencyError", "InputError", "fixture_path"]

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled fixture, e.g. ``fixture_path("basilica.treemap.json")``."""
    return resources.files(__name__).joinpath("fixtures", name)
