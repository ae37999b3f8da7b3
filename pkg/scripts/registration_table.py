"""Run the warm-start chain (1:1, single-gain, grid) for XR Studio against
every physical fixture and print the metric breakdown.

    python scripts/registration_table.py [--seeds 0 1 2] [--restarts 16] [--evaluations 20000]

With the default budget a full run takes tens of minutes on one core.
The chain's objectives are also checked to be non-decreasing.
"""

from __future__ import annotations

import argparse
import time

from retarget import fixtures
from retarget.optimize import SearchConfig, warm_start_chain

PHYSICAL = ("xr_lab", "meeting_room", "home", "office")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--restarts", type=int, default=16)
    ap.add_argument("--evaluations", type=int, default=20_000)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    studio = fixtures.load("xr_studio")
    violations = 0
    print(f"{'space':<13} {'seed':>4} {'method':<11} {'hor':>6} {'ver':>6} {'size':>6} {'sem':>6} {'obj':>8}  gains")
    for name in PHYSICAL:
        phys = fixtures.load(name)
        for seed in args.seeds:
            cfg = SearchConfig(rng_seed=seed, restarts=args.restarts, evaluations_per_restart=args.evaluations, workers=args.workers)
            t0 = time.perf_counter()
            chain = warm_start_chain(studio, phys, cfg)
            for r in chain:
                m = r.report
                g = r.best_gains
                print(
                    f"{name:<13} {seed:>4} {r.method.value:<11} {m.psi_hor:6.3f} {m.psi_ver:6.3f} "
                    f"{m.psi_size:6.3f} {m.psi_sem:6.3f} {r.objective:8.3f}  gx={g.gx} gy={g.gy}"
                )
            objs = [r.objective for r in chain]
            if objs != sorted(objs):
                violations += 1
                print(f"  ordering violated: {objs}")
            print(f"  ({time.perf_counter() - t0:.1f}s)")
    print(f"ordering violations: {violations}")


if __name__ == "__main__":
    main()
