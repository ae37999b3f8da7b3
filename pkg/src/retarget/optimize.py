"""Search over gains and placement for each registration method.

The search is an archive-based continuous ant colony (solution archive ranked
by quality, Gaussian sampling around archive members) run as a seeded
multistart. Two problem-specific moves are mixed into the sampling:

* alignment snapping: set a placement component (or a band gain) to a value
  that puts a physical main-object or wall edge exactly on a virtual one;
* ratio repair: candidates that violate the gain-ratio bounds by at most 5%
  are clamped back onto the feasible boundary.

Candidates are ranked by feasibility first, then objective, then gentler
redirection (smaller max |g - 1|), then smaller offset.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .env import Environment
from .metrics import EDGE_TOL, MetricReport, Placement, Scorer, Weights
from .rescale import GAIN_BOUNDS, RATIO_BOUNDS, GainSet, check_constraints

REPAIR_LIMIT = 0.05
IMPROVEMENT_EPS = 1e-6


class Method(str, Enum):
    RTG_GRID = "rtg_grid"
    RTG_SINGLE = "rtg_single"
    ONE_TO_ONE = "one_to_one"

    @property
    def n_gains(self) -> int:
        return {"rtg_grid": 6, "rtg_single": 2, "one_to_one": 0}[self.value]


@dataclass(frozen=True)
class SearchConfig:
    rng_seed: int = 0
    restarts: int = 16
    evaluations_per_restart: int = 20_000
    gain_bounds: tuple[float, float] = GAIN_BOUNDS
    alpha: tuple[float, float] = RATIO_BOUNDS
    tol: float = EDGE_TOL
    weights: Weights = field(default_factory=Weights)
    archive_size: int = 20
    ants: int = 10
    patience: int = 40
    snap_rate: float = 0.5
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.gain_bounds[0] < self.gain_bounds[1]:
            raise ValueError("gain bounds must be ordered")
        if not self.alpha[0] <= 1.0 <= self.alpha[1]:
            raise ValueError("ratio bounds must bracket 1")
        for name in ("restarts", "evaluations_per_restart", "archive_size", "ants", "patience", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class RegistrationResult:
    method: Method
    best_gains: GainSet
    best_phi: Placement
    report: MetricReport
    objective: float
    feasible: bool
    evaluations: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "best_gains": {"gx": list(self.best_gains.gx), "gy": list(self.best_gains.gy)},
            "best_phi": {"x": self.best_phi.x, "y": self.best_phi.y},
            "report": self.report.to_dict(),
            "objective": self.objective,
            "feasible": self.feasible,
            "evaluations": self.evaluations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RegistrationResult:
        return cls(
            Method(d["method"]),
            GainSet(tuple(d["best_gains"]["gx"]), tuple(d["best_gains"]["gy"])),
            Placement(d["best_phi"]["x"], d["best_phi"]["y"]),
            MetricReport(**d["report"]),
            float(d["objective"]),
            bool(d["feasible"]),
            int(d["evaluations"]),
            int(d["seed"]),
        )


# --- problem encoding -------------------------------------------------------


@dataclass
class _Candidate:
    z: np.ndarray
    feasible: bool
    violation: float
    objective: float
    key: tuple


class _Problem:
    def __init__(self, V: Environment, P: Environment, method: Method, cfg: SearchConfig):
        self.method = method
        self.cfg = cfg
        self.scorer = Scorer(V, P, cfg.weights, cfg.tol)
        self.k = method.n_gains
        lo_g, hi_g = cfg.gain_bounds

        vb = V.footprint.bounds()
        # widest rescaled physical footprint: every band at maximum gain
        top = GainSet((hi_g,) * 3, (hi_g,) * 3)
        bottom = GainSet((lo_g,) * 3, (lo_g,) * 3)
        pr = np.vstack([self.scorer.physical_frame(top)[0], self.scorer.physical_frame(bottom)[0]])
        self.phi_lo = np.array([pr[:, 0].min() - vb[2], pr[:, 1].min() - vb[3]])
        self.phi_hi = np.array([pr[:, 2].max() - vb[0], pr[:, 3].max() - vb[1]])

        # footprint centres aligned at identity gains
        pb = P.footprint.bounds()
        self.centered = Placement(
            0.5 * (pb[0] + pb[2] - vb[0] - vb[2]),
            0.5 * (pb[1] + pb[3] - vb[1] - vb[3]),
        )

        self.lo = np.concatenate([np.full(self.k, lo_g), self.phi_lo])
        self.hi = np.concatenate([np.full(self.k, hi_g), self.phi_hi])
        self._gain_snaps = self._build_gain_snaps()

    # encoding
    def gains(self, z: np.ndarray) -> GainSet:
        if self.k == 0:
            return GainSet.identity()
        if self.k == 2:
            return GainSet.uniform(z[0], z[1])
        return GainSet(tuple(z[0:3]), tuple(z[3:6]))

    def encode(self, gains: GainSet, phi: Placement) -> np.ndarray:
        if self.k == 0:
            g: list[float] = []
        elif self.k == 2:
            if len(set(gains.gx)) != 1 or len(set(gains.gy)) != 1:
                raise ValueError("single-gain method cannot be seeded with grid gains")
            g = [gains.gx[0], gains.gy[0]]
        else:
            g = [*gains.gx, *gains.gy]
        return np.array([*g, phi.x, phi.y], dtype=float)

    def violation(self, z: np.ndarray) -> float:
        """Largest constraint violation (<= 0 means feasible)."""
        if self.k == 0:
            return -1.0
        lo_g, hi_g = self.cfg.gain_bounds
        al, ah = self.cfg.alpha
        g = z[: self.k]
        gx, gy = (g[:1], g[1:2]) if self.k == 2 else (g[:3], g[3:6])
        r_low = gx.min() / gy.max()
        r_high = gx.max() / gy.min()
        return float(max(lo_g - g.min(), g.max() - hi_g, al - r_low, r_low - ah, al - r_high, r_high - ah))

    def assess(self, z: np.ndarray) -> _Candidate:
        viol = self.violation(z)
        gdev = float(np.abs(z[: self.k] - 1.0).max()) if self.k else 0.0
        pnorm = math.hypot(z[-2], z[-1])
        if viol > 0:
            return _Candidate(z, False, viol, -math.inf, (1, viol, gdev, pnorm))
        obj = self.scorer.evaluate(self.gains(z), (z[-2], z[-1])).objective
        return _Candidate(z, True, viol, obj, (0, -obj, gdev, pnorm))

    # moves
    def _build_gain_snaps(self) -> dict[tuple[str, int], np.ndarray]:
        """Gains that make the rescaled spacing of two physical features equal to
        the spacing of two same-class virtual features."""
        if self.k == 0:
            return {}
        lo_g, hi_g = self.cfg.gain_bounds
        feats = self.scorer.feature_coords()
        part = self.scorer.partition
        snaps: dict[tuple[str, int], np.ndarray] = {}
        for axis in ("x", "y"):
            vf, pf = feats[axis]
            b1, b2 = part.x_bounds if axis == "x" else part.y_bounds
            bands = [(-math.inf, math.inf)] if self.k == 2 else [(-math.inf, b1), (b1, b2), (b2, math.inf)]
            for bi, (blo, bhi) in enumerate(bands):
                vals = set()
                for c1 in ("main", "wall"):
                    for c2 in ("main", "wall"):
                        for pk in pf[c1]:
                            for pl in pf[c2]:
                                if not (blo <= pk < pl <= bhi):
                                    continue
                                for vi in vf[c1]:
                                    for vj in vf[c2]:
                                        g = (vj - vi) / (pl - pk)
                                        if lo_g <= g <= hi_g:
                                            vals.add(round(g, 12))
                snaps[(axis, bi)] = np.array(sorted(vals))
        return snaps

    def snap(self, z: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        z = z.copy()
        if self.k and rng.random() < 0.5:
            axis = "x" if rng.random() < 0.5 else "y"
            band = 0 if self.k == 2 else int(rng.integers(3))
            cands = self._gain_snaps[(axis, band)]
            if len(cands):
                idx = band + (0 if axis == "x" else (1 if self.k == 2 else 3))
                if rng.random() < 0.25:
                    z[idx] = cands[rng.integers(len(cands))]
                else:
                    z[idx] = cands[np.abs(cands - z[idx]).argmin()]
        feats = self.scorer.feature_coords(self.gains(np.clip(z, self.lo, self.hi)))
        for ai, axis in enumerate(("x", "y")):
            if rng.random() >= 0.7:
                continue
            vf, pf = feats[axis]
            cands = np.concatenate([(pf[c][:, None] - vf[c][None, :]).ravel() for c in ("main", "wall")])
            if not len(cands):
                continue
            j = self.k + ai
            if rng.random() < 0.25:
                z[j] = cands[rng.integers(len(cands))]
            else:
                z[j] = cands[np.abs(cands - z[j]).argmin()]
        return np.clip(z, self.lo, self.hi)

    def repair(self, z: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.k == 0:
            return z
        al, ah = self.cfg.alpha
        g = z[: self.k]
        gx, gy = (g[:1], g[1:2]) if self.k == 2 else (g[:3], g[3:6])
        excess_high = (gx.max() / gy.min() - ah) / ah
        excess_low = (al - gx.min() / gy.max()) / al
        if max(excess_high, excess_low) <= 0 or max(excess_high, excess_low) > REPAIR_LIMIT:
            return z
        z = z.copy()
        g = z[: self.k]
        gx, gy = (g[:1], g[1:2]) if self.k == 2 else (g[:3], g[3:6])
        if rng.random() < 0.5:
            if excess_high > 0:
                np.minimum(gx, ah * gy.min() * (1 - 1e-12), out=gx)
            if gx.min() / gy.max() < al:
                np.maximum(gx, al * gy.max() * (1 + 1e-12), out=gx)
        else:
            if excess_high > 0:
                np.maximum(gy, gx.max() / ah * (1 + 1e-12), out=gy)
            if gx.min() / gy.max() < al:
                np.minimum(gy, gx.min() / al * (1 - 1e-12), out=gy)
        return np.clip(z, self.lo, self.hi)


# --- search -----------------------------------------------------------------


def _rank_weights(k: int, q: float = 0.25) -> np.ndarray:
    ranks = np.arange(k)
    w = np.exp(-(ranks**2) / (2 * (q * k) ** 2))
    return w / w.sum()


def _run_restart(
    problem: _Problem, seed_seq: np.random.SeedSequence, seeds: Sequence[np.ndarray]
) -> tuple[_Candidate, int]:
    cfg = problem.cfg
    rng = np.random.default_rng(seed_seq)
    k = cfg.archive_size
    span = problem.hi - problem.lo
    evals = 0

    pool: list[_Candidate] = []
    for z in seeds:
        pool.append(problem.assess(np.array(z, dtype=float)))
        evals += 1
    center = problem.encode(GainSet.identity(), problem.centered)
    center[: problem.k] = 1.0
    pool.append(problem.assess(center))
    evals += 1
    while len(pool) < 2 * k:
        z = problem.lo + rng.random(len(span)) * span
        if rng.random() < cfg.snap_rate:
            z = problem.snap(z, rng)
        pool.append(problem.assess(problem.repair(z, rng)))
        evals += 1

    archive = sorted(pool, key=lambda c: c.key)[:k]
    best = archive[0]
    weights = _rank_weights(len(archive))
    stale = 0
    floor = 1e-7 * span
    while evals < cfg.evaluations_per_restart and stale < cfg.patience:
        zs = np.array([c.z for c in archive])
        new = []
        for _ in range(cfg.ants):
            if evals >= cfg.evaluations_per_restart:
                break
            guide = rng.choice(len(archive), p=weights)
            sigma = 0.85 * np.abs(zs - zs[guide]).mean(axis=0) + floor
            z = np.clip(zs[guide] + sigma * rng.standard_normal(len(span)), problem.lo, problem.hi)
            if rng.random() < cfg.snap_rate:
                z = problem.snap(z, rng)
            new.append(problem.assess(problem.repair(z, rng)))
            evals += 1
        archive = _merge(archive, new, k)
        if _improves(archive[0], best):
            stale = 0
        else:
            stale += 1
        if archive[0].key < best.key:
            best = archive[0]
    return best, evals


def _improves(new: _Candidate, old: _Candidate) -> bool:
    """Progress test for stagnation; sub-1e-6 objective gains do not count."""
    if new.feasible != old.feasible:
        return new.feasible
    if not new.feasible:
        return new.violation < old.violation - 1e-9
    return new.objective > old.objective + IMPROVEMENT_EPS


def _merge(archive: list[_Candidate], new: list[_Candidate], k: int) -> list[_Candidate]:
    seen = set()
    out = []
    for c in sorted(archive + new, key=lambda c: c.key):
        tag = c.z.tobytes()
        if tag in seen:
            continue
        seen.add(tag)
        out.append(c)
        if len(out) == k:
            break
    return out


def _restart_task(args):
    V, P, method, cfg, seed_seq, seeds = args
    return _run_restart(_Problem(V, P, method, cfg), seed_seq, seeds)


def register(
    V: Environment,
    P: Environment,
    method: Method | str,
    cfg: SearchConfig = SearchConfig(),
    seeds: Iterable[tuple[GainSet, Placement]] = (),
) -> RegistrationResult:
    """Maximize the weighted objective over the method's variables.

    ``seeds`` are (gains, placement) pairs inserted verbatim into every
    restart's initial archive; the identity-gain centered placement is always
    added, so a feasible answer always exists.
    """
    method = Method(method)
    problem = _Problem(V, P, method, cfg)
    seed_z = [problem.encode(g, Placement.of(p)) for g, p in seeds]
    children = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.restarts)

    if cfg.workers > 1:
        tasks = [(V, P, method, cfg, s, seed_z) for s in children]
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            outcomes = list(ex.map(_restart_task, tasks))
    else:
        outcomes = [_run_restart(problem, s, seed_z) for s in children]

    best, total = None, 0
    for cand, n in outcomes:
        total += n
        if best is None or cand.key < best.key:
            best = cand
    assert best is not None

    gains = problem.gains(best.z)
    phi = Placement(float(best.z[-2]), float(best.z[-1]))
    feasible = check_constraints(gains, cfg.alpha, cfg.gain_bounds).feasible
    if not feasible:
        raise RuntimeError("search returned an infeasible candidate")
    report = problem.scorer.evaluate(gains, phi)
    return RegistrationResult(method, gains, phi, report, report.objective, feasible, total, cfg.rng_seed)


def warm_start_chain(
    V: Environment, P: Environment, cfg: SearchConfig = SearchConfig()
) -> tuple[RegistrationResult, RegistrationResult, RegistrationResult]:
    """1:1, then single gain seeded from it, then grid gains seeded from both.

    Each stage's archive contains the previous optimum, evaluated identically,
    so objectives are non-decreasing along the chain.
    """
    one = register(V, P, Method.ONE_TO_ONE, cfg)
    single = register(V, P, Method.RTG_SINGLE, cfg, seeds=[(GainSet.identity(), one.best_phi)])
    grid = register(
        V,
        P,
        Method.RTG_GRID,
        cfg,
        seeds=[(single.best_gains, single.best_phi), (GainSet.identity(), one.best_phi)],
    )
    return one, single, grid
