"""Regenerate the packaged room fixtures.

Room and table dimensions are the published ones. Object placements are
invented but plausible; one object per room is slid along an axis direction
until the object scatteredness matches the published value, then all
coordinates are rounded to 0.1 mm.

    python scripts/build_fixtures.py [--check]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from retarget.complexity import object_scatteredness
from retarget.env import dump_environment, make_environment

OUT = Path(__file__).resolve().parents[1] / "src" / "retarget" / "fixtures"

# name -> (room w, room h, table rect, obstacles, target OS)
ROOMS = {
    "xr_studio": (
        8.4, 6.0,
        (2.15, 3.6, 6.25, 4.4),
        [
            (1.6, 5.6, 6.8, 6.0),  # monitor wall
            (3.0, 0.8, 5.4, 2.0),  # meeting table with chairs
            (0.0, 1.5, 0.7, 3.0),  # pc desk
            (7.7, 1.5, 8.4, 3.0),  # pc desk
        ],
        69.18,
    ),
    "xr_lab": (
        6.8, 3.6,
        (1.425, 1.6, 5.375, 2.35),
        [
            (1.2, 3.2, 5.6, 3.6),  # monitors
            (6.2, 0.0, 6.8, 1.0),  # cabinet
        ],
        6.68,
    ),
    "meeting_room": (
        7.6, 3.5,
        (1.9, 1.15, 4.9, 2.35),
        [
            (6.6, 2.7, 7.6, 3.5),  # small desk
            (6.3, 2.1, 6.7, 2.5),  # chair
        ],
        14.56,
    ),
    "home": (
        6.8, 6.0,
        (2.55, 2.575, 4.25, 3.425),
        [
            (1.5, 0.0, 5.0, 0.9),  # sofa
            (5.9, 1.2, 6.8, 2.1),  # armchair
        ],
        7.27,
    ),
    "office": (
        3.5, 2.7,
        (0.0, 1.8, 2.0, 2.7),
        [
            (0.8, 1.2, 1.3, 1.7),  # chair
            (3.0, 0.0, 3.5, 0.5),  # cabinet
            (2.9, 1.9, 3.5, 2.7),  # shelf
        ],
        9.27,
    ),
}

DIRECTIONS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


def _shifted(rect, d, t):
    return (rect[0] + d[0] * t, rect[1] + d[1] * t, rect[2] + d[0] * t, rect[3] + d[1] * t)


def _env(name, obstacles, rounded=False):
    w, h, table = ROOMS[name][:3]
    if rounded:
        obstacles = [tuple(round(v, 4) for v in r) for r in obstacles]
    return make_environment(name, [(0.0, 0.0, w, h)], table, obstacles)


def build(name: str):
    """Smallest single-object shift (over objects and axis directions) that
    hits the target scatteredness."""
    obstacles, target = ROOMS[name][3], ROOMS[name][4]
    best = None
    for idx in range(len(obstacles)):
        for d in DIRECTIONS:

            def layout(t):
                obs = list(obstacles)
                obs[idx] = _shifted(obs[idx], d, t)
                return obs

            def gap(t):
                return object_scatteredness(_env(name, layout(t))) - target

            ts = np.linspace(0.0, 6.0, 601)
            vals = []
            for t in ts:
                try:
                    vals.append(gap(t))
                except ValueError:
                    vals.append(np.nan)
            vals = np.array(vals)
            ok = np.isfinite(vals[:-1]) & np.isfinite(vals[1:]) & (np.sign(vals[:-1]) != np.sign(vals[1:]))
            if not ok.any():
                continue
            i = np.flatnonzero(ok)[0]
            t = brentq(gap, ts[i], ts[i + 1], xtol=1e-12)
            try:
                env = _env(name, layout(t), rounded=True)
            except ValueError:
                continue
            if best is None or t < best[0]:
                best = (t, env)
    if best is None:
        raise SystemExit(f"{name}: target OS {target} not reachable by shifting one object")
    return best[1], target


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="verify packaged fixtures instead of writing")
    args = ap.parse_args(argv)
    OUT.mkdir(parents=True, exist_ok=True)
    bad = 0
    for name in ROOMS:
        env, target = build(name)
        os_ = object_scatteredness(env)
        status = "ok" if abs(os_ - target) < 5e-3 else "OFF"
        bad += status != "ok"
        print(f"{name:13s} area={env.area:6.2f}  OS={os_:8.4f} (target {target})  {status}")
        path = OUT / f"{name}.json"
        if args.check:
            if json.loads(path.read_text()) != json.loads(dump_environment(env)):
                print(f"  {path.name} differs from the generated layout")
                bad += 1
        else:
            path.write_bytes(dump_environment(env) + b"\n")
    simple = make_environment("simple", [(0.0, 0.0, 10.0, 10.0)], (4.0, 4.0, 6.0, 6.0))
    if not args.check:
        (OUT / "simple.json").write_bytes(dump_environment(simple) + b"\n")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
