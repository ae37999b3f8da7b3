"""Command-line entry point.

    retarget register --virtual V.json --physical P.json [--method all] [--seed N]
    retarget complexity --env E.json [--c-override C]
    retarget dissimilarity --virtual V.json --physical P.json [overrides]
    retarget simulate --physical P.json --gains 1.04,1.07 --path "1,1 3,1 3,2"
    retarget render --in result.json --virtual V.json --physical P.json --out o.svg

Exit status: 0 on success, 2 on invalid input (diagnostic on stderr), 1 on
internal failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .complexity import (
    ClearanceKernel,
    ConstantKernel,
    pair_report,
    spatial_complexity,
)
from .env import Environment, load_environment_file
from .geom import GeometryError
from .metrics import EDGE_TOL, Weights
from .optimize import Method, RegistrationResult, SearchConfig, register, warm_start_chain
from .rescale import (
    GAIN_BOUNDS,
    RATIO_BOUNDS,
    SMOOTHING_HALF_WIDTH,
    GainSet,
    SmoothedGainField,
    make_rescale_map,
    simulate_walk,
)

log = logging.getLogger("retarget")

SEED_ENV = "RETARGET_SEED"


class UsageError(ValueError):
    """Bad user input; reported with exit status 2."""


@dataclass
class RunConfig:
    weights: str = "100,30,5,10"
    tol: float = EDGE_TOL
    alpha: tuple[float, float] = RATIO_BOUNDS
    gain_bounds: tuple[float, float] = GAIN_BOUNDS
    l_s: float = SMOOTHING_HALF_WIDTH
    seed: int = 0
    restarts: int = 16
    evaluations: int = 20_000
    workers: int = 1
    out: str | None = None
    svg: str | None = None

    def __post_init__(self) -> None:
        self.alpha = _pair(self.alpha, "alpha")
        self.gain_bounds = _pair(self.gain_bounds, "gain_bounds")
        if not self.l_s > 0:
            raise UsageError("l_s must be positive")
        # constructs and validates the optimizer view
        self.search_config()

    def search_config(self) -> SearchConfig:
        try:
            return SearchConfig(
                rng_seed=int(self.seed),
                restarts=int(self.restarts),
                evaluations_per_restart=int(self.evaluations),
                gain_bounds=self.gain_bounds,
                alpha=self.alpha,
                tol=float(self.tol),
                weights=Weights.parse(self.weights),
                workers=int(self.workers),
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> dict[str, Any]:
        doc = _read_json(path)
        if not isinstance(doc, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - names)
        if unknown:
            raise UsageError(f"{path}: unknown config keys {unknown}")
        return doc


def _pair(v, name: str) -> tuple[float, float]:
    if isinstance(v, str):
        v = _floats(v, name)
    v = tuple(float(t) for t in v)
    if len(v) != 2:
        raise UsageError(f"{name} needs two values")
    return v


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{name}: cannot parse {text!r} as numbers") from None


def _read_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{p}: invalid JSON ({exc})") from None


def _load_env(path: str) -> Environment:
    if not Path(path).is_file():
        raise UsageError(f"file not found: {path}")
    try:
        return load_environment_file(path)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# --- register ---------------------------------------------------------------


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None
    if args.config:
        values.update(RunConfig.from_file(args.config))
    for name in ("weights", "tol", "alpha", "gain_bounds", "seed", "restarts", "evaluations", "workers", "out", "svg"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def cmd_register(args: argparse.Namespace) -> int:
    rc = build_run_config(args)
    cfg = rc.search_config()
    V, P = _load_env(args.virtual), _load_env(args.physical)
    if args.method == "all":
        results = list(warm_start_chain(V, P, cfg))
        doc: Any = {"results": [r.to_dict() for r in results]}
    else:
        results = [register(V, P, Method(args.method), cfg)]
        doc = results[0].to_dict()
    for r in results:
        log.info("%s objective=%.4f evaluations=%d", r.method.value, r.objective, r.evaluations)
    _emit(_dump(doc), rc.out)
    if rc.svg:
        from .render import render_registration

        Path(rc.svg).write_text(render_registration(V, P, results[-1], tol=cfg.tol), encoding="utf-8")
    return 0


# --- complexity -------------------------------------------------------------


def _kernel(override: float | None, spacing: float):
    if override is not None:
        return ConstantKernel(override)
    return ClearanceKernel(spacing=spacing)


def cmd_complexity(args: argparse.Namespace) -> int:
    e = _load_env(args.env)
    rep = spatial_complexity(e, _kernel(args.c_override, args.spacing))
    _emit(_dump(rep.to_dict()), args.out)
    return 0


def cmd_dissimilarity(args: argparse.Namespace) -> int:
    V, P = _load_env(args.virtual), _load_env(args.physical)
    reps = []
    for e, c, sc in ((V, args.c_virtual, args.sc_virtual), (P, args.c_physical, args.sc_physical)):
        rep = spatial_complexity(e, _kernel(c, args.spacing))
        if sc is not None:
            if not sc > 0:
                raise UsageError("spatial complexity override must be positive")
            rep = dataclasses.replace(rep, sc=float(sc))
        reps.append(rep)
    pr = pair_report(reps[0], reps[1], V.main_object.rect.area, P.main_object.rect.area)
    doc = {"virtual": reps[0].to_dict(), "physical": reps[1].to_dict(), **pr.to_dict()}
    _emit(_dump(doc), args.out)
    return 0


# --- simulate ---------------------------------------------------------------


def _parse_gains(text: str) -> GainSet:
    vals = _floats(text, "gains")
    if len(vals) == 2:
        return GainSet.uniform(*vals)
    if len(vals) == 6:
        return GainSet(tuple(vals[:3]), tuple(vals[3:]))
    raise UsageError("gains: give gx,gy or gx1,gx2,gx3,gy1,gy2,gy3")


def _parse_path(text: str) -> np.ndarray:
    pts = []
    for tok in text.split():
        xy = _floats(tok, "path")
        if len(xy) != 2:
            raise UsageError(f"path: bad point {tok!r}, expected x,y")
        pts.append(xy)
    if not pts:
        raise UsageError("path: no points given")
    return np.array(pts)


def _load_result(path: str, method: str | None) -> RegistrationResult:
    doc = _read_json(path)
    docs = doc["results"] if isinstance(doc, dict) and "results" in doc else [doc]
    try:
        results = [RegistrationResult.from_dict(d) for d in docs]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a registration result ({exc})") from None
    if method is None:
        return results[-1]
    for r in results:
        if r.method.value == method:
            return r
    raise UsageError(f"{path}: no result for method {method!r}")


def cmd_simulate(args: argparse.Namespace) -> int:
    P = _load_env(args.physical)
    phi = (0.0, 0.0)
    if args.result:
        res = _load_result(args.result, args.method)
        gains, phi = res.best_gains, (res.best_phi.x, res.best_phi.y)
    elif args.gains:
        gains = _parse_gains(args.gains)
    else:
        raise UsageError("simulate needs --gains or --result")
    if args.phi:
        phi = tuple(_pair(args.phi, "phi"))
    field_ = SmoothedGainField(make_rescale_map(P, gains), l_s=args.ls)
    walk = simulate_walk(field_, _parse_path(args.path), step=args.step)
    rows = walk.rows()
    rows[:, 2] -= phi[0]
    rows[:, 3] -= phi[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["phys_x", "phys_y", "virt_x", "virt_y", "gx", "gy"])
    for row in rows:
        w.writerow([f"{v:.6f}" for v in row])
    _emit(buf.getvalue(), args.out)
    return 0


# --- render -----------------------------------------------------------------


def cmd_render(args: argparse.Namespace) -> int:
    from .render import render_registration

    V, P = _load_env(args.virtual), _load_env(args.physical)
    res = _load_result(args.input, args.method)
    _emit(render_registration(V, P, res, tol=args.tol), args.out)
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="retarget", description="Register a virtual floorplan onto a physical one.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("register", help="optimize gains and placement")
    r.add_argument("--virtual", required=True)
    r.add_argument("--physical", required=True)
    r.add_argument("--method", default="all", choices=[m.value for m in Method] + ["all"])
    r.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    r.add_argument("--seed", type=int, help=f"falls back to ${SEED_ENV}, then 0")
    r.add_argument("--restarts", type=int)
    r.add_argument("--evaluations", type=int, help="evaluation budget per restart")
    r.add_argument("--weights", help="hor,ver,size,sem")
    r.add_argument("--tol", type=float)
    r.add_argument("--alpha", help="lo,hi gain-ratio bounds")
    r.add_argument("--gain-bounds", dest="gain_bounds", help="lo,hi per-gain bounds")
    r.add_argument("--workers", type=int)
    r.add_argument("--out", help="result JSON path (default stdout)")
    r.add_argument("--svg", help="also render the last result to this path")
    r.set_defaults(func=cmd_register)

    c = sub.add_parser("complexity", help="area, clearance, scatteredness, spatial complexity")
    c.add_argument("--env", required=True)
    c.add_argument("--c-override", dest="c_override", type=float)
    c.add_argument("--spacing", type=float, default=0.2)
    c.add_argument("--out")
    c.set_defaults(func=cmd_complexity)

    d = sub.add_parser("dissimilarity", help="SD, SMD and CR for a virtual/physical pair")
    d.add_argument("--virtual", required=True)
    d.add_argument("--physical", required=True)
    d.add_argument("--c-virtual", dest="c_virtual", type=float)
    d.add_argument("--c-physical", dest="c_physical", type=float)
    d.add_argument("--sc-virtual", dest="sc_virtual", type=float, help="replace the computed SC")
    d.add_argument("--sc-physical", dest="sc_physical", type=float, help="replace the computed SC")
    d.add_argument("--spacing", type=float, default=0.2)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dissimilarity)

    s = sub.add_parser("simulate", help="walk a physical path through the smoothed gain field (CSV)")
    s.add_argument("--physical", required=True)
    s.add_argument("--gains", help="gx,gy or gx1,gx2,gx3,gy1,gy2,gy3")
    s.add_argument("--result", help="registration result JSON to take gains and placement from")
    s.add_argument("--method", choices=[m.value for m in Method])
    s.add_argument("--phi", help="x,y placement subtracted from virtual coordinates")
    s.add_argument("--path", required=True, help='whitespace-separated points, e.g. "1,1 3,1 3,2"')
    s.add_argument("--ls", type=float, default=SMOOTHING_HALF_WIDTH)
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("render", help="SVG overlay of a registration result")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--virtual", required=True)
    v.add_argument("--physical", required=True)
    v.add_argument("--method", choices=[m.value for m in Method])
    v.add_argument("--tol", type=float, default=EDGE_TOL)
    v.add_argument("--out")
    v.set_defaults(func=cmd_render)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, GeometryError, ValueError, KeyError) as exc:
        print(f"retarget {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"retarget {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("internal failure", exc_info=True)
        print(f"retarget {args.command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
