"""Shared builders and published reference numbers for the test suite."""

from __future__ import annotations

from retarget.env import make_environment

# room size and table (w, h) per space
SPACES = {
    "xr_studio": ((8.4, 6.0), (4.10, 0.80)),
    "xr_lab": ((6.8, 3.6), (3.95, 0.75)),
    "meeting_room": ((7.6, 3.5), (3.00, 1.20)),
    "home": ((6.8, 6.0), (1.70, 0.85)),
    "office": ((3.5, 2.7), (2.00, 0.90)),
}
C_VALUES = {"xr_studio": 6.50, "xr_lab": 7.36, "meeting_room": 6.64, "home": 8.55, "office": 3.30}
OS_VALUES = {"xr_studio": 69.18, "xr_lab": 6.68, "meeting_room": 14.56, "home": 7.27, "office": 9.27}
SC_VALUES = {"xr_studio": 115.30, "xr_lab": 43.04, "meeting_room": 48.80, "home": 57.92, "office": 17.42}
SD_VALUES = {"xr_lab": 0.9841, "meeting_room": 0.8598, "home": 0.6884, "office": 1.8900}
SMD_VALUES = {"xr_lab": 0.0985, "meeting_room": 0.2442, "home": 0.4464, "office": 1.2367}
CR_VALUES = {"xr_lab": 1.1323, "meeting_room": 1.0215, "home": 1.3154, "office": 0.5077}


def table_area(name: str) -> float:
    w, h = SPACES[name][1]
    return w * h


def synthetic_virtual():
    """XR Studio sized room holding only its table."""
    return make_environment("virtual", [(0.0, 0.0, 8.4, 6.0)], (2.15, 3.6, 6.25, 4.4))


def synthetic_physical(name: str):
    """A 20 m square room with the named space's table at its centre, so
    walls can never line up and only the table edges matter."""
    w, h = SPACES[name][1]
    return make_environment(f"{name}_dims", [(0.0, 0.0, 20.0, 20.0)], (10 - w / 2, 10 - h / 2, 10 + w / 2, 10 + h / 2))


# acceptance bookkeeping: criterion number -> (title, passed, detail)
RESULTS: dict[int, tuple[str, bool, str]] = {}


class Criterion:
    """Context manager that records a pass/fail line for one criterion."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok else f"{self.detail} {exc}".strip()
        RESULTS[self.number] = (self.title, ok, detail)
        line = f"{'PASS' if ok else 'FAIL'} criterion {self.number:2d}: {self.title}"
        print(line + (f" [{detail}]" if detail else ""))
        return False
