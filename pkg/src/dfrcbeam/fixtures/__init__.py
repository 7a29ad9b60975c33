"""Shipped scenario fixtures for the reference experiments."""

from importlib import resources


def fixture_path(name: str):
    """Filesystem path of a shipped fixture, e.g. fixture_path("tradeoff_single_user")."""
    if not name.endswith(".yaml"):
        name = f"{name}.yaml"
    return resources.files(__package__) / name
