"""Print complexity and dissimilarity figures for the XR Studio pairings.

Two rows per physical space: one computed from the published clearance
values (C) and one from the packaged fixtures with the sampled clearance
kernel.

    python scripts/complexity_table.py
"""

from __future__ import annotations

from retarget import fixtures
from retarget.complexity import ClearanceKernel, ConstantKernel, pair_report, spatial_complexity

PUBLISHED_C = {"xr_studio": 6.50, "xr_lab": 7.36, "meeting_room": 6.64, "home": 8.55, "office": 3.30}
PHYSICAL = ("xr_lab", "meeting_room", "home", "office")


def row(label, v, p, kernel_v, kernel_p):
    rv, rp = spatial_complexity(v, kernel_v), spatial_complexity(p, kernel_p)
    pr = pair_report(rv, rp, v.main_object.rect.area, p.main_object.rect.area)
    print(f"{label:<28} {rp.os:8.2f} {rp.c:6.2f} {rp.sc:8.2f} {pr.sd:7.4f} {pr.smd:7.4f} {pr.cr:7.4f}")


def main() -> None:
    studio = fixtures.load("xr_studio")
    print(f"{'space':<28} {'OS':>8} {'C':>6} {'SC':>8} {'SD':>7} {'SMD':>7} {'CR':>7}")
    for name in PHYSICAL:
        p = fixtures.load(name)
        row(f"{name} (published C)", studio, p, ConstantKernel(PUBLISHED_C["xr_studio"]), ConstantKernel(PUBLISHED_C[name]))
        row(f"{name} (sampled C)", studio, p, ClearanceKernel(), ClearanceKernel())


if __name__ == "__main__":
    main()
