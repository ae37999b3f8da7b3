"""Packaged room fixtures (dimensions from the published tables, layouts approximate)."""

from __future__ import annotations

from importlib import resources

from ..env import Environment, load_environment

NAMES = ("xr_studio", "xr_lab", "meeting_room", "home", "office", "simple")
PHYSICAL = ("xr_lab", "meeting_room", "home", "office")


def path(name: str):
    return resources.files(__package__) / f"{name}.json"


def load(name: str) -> Environment:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    return load_environment(path(name).read_bytes())
