"""Monte Carlo experiment engine: property estimates and threshold sweeps.

Probabilities of reachability properties are estimated over independent
seeded trials; sweeps scan a grid of edge probabilities expressed as
multiples of ``ln n / n`` (the natural unit for the studied thresholds).
Every (grid point, trial) cell draws its sample from the stream
``(seed, factor_index * 2**32 + trial)``, so single rows and arbitrary
trial shards are reproducible in isolation and results are independent of
scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from . import spanner as spanner_mod
from .core import (TemporalGraph, _reach_count, is_temporal_source,
                   is_temporally_connected, restrict, temporal_source_exists,
                   two_hop_source_check)
from .foremost import (Trajectory, foremost_tree, reference_curve_points,
                       truncation_caps, truncate_trajectory,
                       trajectory_deviation)
from .gen import RngStream, sample_complete, sample_fnp, sample_poisson

__all__ = [
    "PropertyId",
    "ExperimentRow",
    "SweepGrid",
    "TrajectoryExperiment",
    "evaluate_property",
    "estimate_probability",
    "threshold_sweep",
    "trajectory_experiment",
    "crossing_factor",
    "wald_interval",
]

_STREAM_FACTOR_SHIFT = 32  # stream id = factor_index << 32 | trial


class PropertyId(Enum):
    """Reachability properties evaluated per sampled graph."""

    P2P = "p2p"                        # vertex 0 reaches vertex 1
    FIRST_SOURCE = "first_source"      # some vertex is a temporal source
    SOURCE = "source"                  # vertex 0 is a temporal source
    CONNECTIVITY = "connectivity"      # all vertices are temporal sources
    OPTIMAL_SPANNER = "optimal_spanner"  # 2n-4 spanner construction succeeds
    TWO_HOP_SOURCE = "two_hop_source"  # vertex 0 is a two-hop source

    @classmethod
    def parse(cls, name: str) -> "PropertyId":
        try:
            return cls(name.strip().lower().replace("-", "_"))
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown property {name!r}; expected one of {valid}")


@dataclass
class ExperimentRow:
    """One Monte Carlo estimate: successes out of trials at a grid point."""

    property: PropertyId
    model: str
    n: int
    p: float
    factor: float
    trials: int
    successes: int
    seed: int
    wall_time_ms: int = 0

    @property
    def estimate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class SweepGrid:
    """Strictly increasing multipliers of ``ln n / n``."""

    factors: tuple

    def __post_init__(self):
        f = tuple(float(x) for x in self.factors)
        if not f:
            raise ValueError("grid must contain at least one factor")
        if any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError("grid factors must be strictly increasing")
        object.__setattr__(self, "factors", f)

    def p_values(self, n: int) -> List[float]:
        if n < 2:
            raise ValueError("sweeps need n >= 2")
        unit = math.log(n) / n
        ps = [c * unit for c in self.factors]
        if ps[-1] > 1.0:
            raise ValueError(
                f"factor {self.factors[-1]} gives p={ps[-1]:.4g} > 1 at n={n}")
        return ps


def evaluate_property(prop: PropertyId, g: TemporalGraph, p: float) -> bool:
    """Evaluate one property on one sampled graph.

    ``p`` is the sampling parameter of ``g``; only the spanner property
    needs it (to partition the window).
    """
    if prop is PropertyId.P2P:
        if g.n < 2:
            raise ValueError("P2P needs n >= 2")
        lab, eu, ev = g.events()
        arr = np.empty(g.n)
        _reach_count(lab, eu, ev, g.n, 0, g.window[0], arr)
        return bool(np.isfinite(arr[1]))
    if prop is PropertyId.SOURCE:
        return is_temporal_source(g, 0)
    if prop is PropertyId.FIRST_SOURCE:
        return temporal_source_exists(g)
    if prop is PropertyId.CONNECTIVITY:
        return is_temporally_connected(g)
    if prop is PropertyId.TWO_HOP_SOURCE:
        return two_hop_source_check(g, 0)
    if prop is PropertyId.OPTIMAL_SPANNER:
        try:
            spanner_mod.build_optimal_spanner(g, p)
            return True
        except (spanner_mod.NoGoodSquareError, ValueError):
            return False
    raise ValueError(f"unhandled property {prop}")


def _sample(model: str, n: int, p: float, stream: RngStream) -> TemporalGraph:
    if model == "fnp":
        return sample_fnp(n, p, stream)
    if model == "poisson":
        return sample_poisson(n, p, stream)
    raise ValueError(f"unknown model {model!r}; expected 'fnp' or 'poisson'")


def estimate_probability(prop: PropertyId, model: str, n: int, p: float,
                         trials: int, seed: int, *, stream_base: int = 0,
                         threads: int = 1) -> ExperimentRow:
    """Estimate P[property] from ``trials`` independent seeded samples.

    Trial ``t`` uses the stream ``(seed, stream_base + t)``; successes are
    therefore additive over disjoint trial ranges run with the same seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 2:
        raise ValueError("estimates need n >= 2")
    t0 = time.perf_counter()

    def one(t: int) -> bool:
        g = _sample(model, n, p, RngStream(seed, stream_base + t))
        return evaluate_property(prop, g, p)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]
    succ = int(sum(results))
    ms = int(round((time.perf_counter() - t0) * 1000.0))
    factor = p * n / math.log(n)
    return ExperimentRow(property=prop, model=model, n=n, p=p, factor=factor,
                         trials=trials, successes=succ, seed=seed,
                         wall_time_ms=ms)


def threshold_sweep(prop: PropertyId, model: str, n: int, grid: SweepGrid,
                    trials: int, seed: int, *, coupled: bool = False,
                    threads: int = 1) -> List[ExperimentRow]:
    """One estimate per grid factor, each row independently reproducible.

    ``coupled=True`` draws a single complete sample per trial and restricts
    it at every grid point (small ``n`` only: quadratic memory); this makes
    the monotone properties exactly monotone along the grid within each
    trial.  The default draws a fresh sparse sample per (factor, trial).
    """
    ps = grid.p_values(n)
    if not coupled:
        return [estimate_probability(prop, model, n, p, trials, seed,
                                     stream_base=fi << _STREAM_FACTOR_SHIFT,
                                     threads=threads)
                for fi, p in enumerate(ps)]

    if model != "fnp":
        raise ValueError("coupled sweeps are defined for the fnp model only")
    succ = [0] * len(ps)
    wall = [0.0] * len(ps)
    for t in range(trials):
        base = sample_complete(n, RngStream(seed, t))
        for fi, p in enumerate(ps):
            s = time.perf_counter()
            g = restrict(base, 0.0, p)
            if evaluate_property(prop, g, p):
                succ[fi] += 1
            wall[fi] += time.perf_counter() - s
    return [ExperimentRow(property=prop, model=model, n=n, p=p,
                          factor=grid.factors[fi], trials=trials,
                          successes=succ[fi], seed=seed,
                          wall_time_ms=int(round(wall[fi] * 1000.0)))
            for fi, p in enumerate(ps)]


def crossing_factor(rows: Sequence[ExperimentRow]):
    """Smallest grid factor with estimate >= 0.5, plus an interpolation.

    Returns ``(grid_factor, interpolated)``; both None when the sweep never
    reaches 0.5.  The interpolated value is a convenience: linear between
    the bracketing grid points (equal to the grid factor when it is the
    first point or the previous estimate already exceeds 0.5).
    """
    rows = sorted(rows, key=lambda r: r.factor)
    for i, r in enumerate(rows):
        if r.estimate >= 0.5:
            if i == 0 or rows[i - 1].estimate >= 0.5:
                return r.factor, r.factor
            lo, hi = rows[i - 1], r
            span = hi.estimate - lo.estimate
            frac = (0.5 - lo.estimate) / span if span > 0 else 1.0
            return r.factor, lo.factor + frac * (hi.factor - lo.factor)
    return None, None


def wald_interval(successes: int, trials: int, z: float = 1.96):
    """Plain Wald confidence interval for a binomial proportion."""
    e = successes / trials
    half = z * math.sqrt(max(e * (1.0 - e), 0.0) / trials)
    return max(0.0, e - half), min(1.0, e + half)


@dataclass
class TrajectoryExperiment:
    """Per-trial trajectory statistics on complete random graphs."""

    n: int
    trials: int
    seed: int
    y: np.ndarray            # (trials, n-1) raw trajectories
    y_hat: np.ndarray        # (trials, n-1) truncated trajectories
    reference: np.ndarray    # (n-1,) reference curve at k = 1..n-1
    deviations: np.ndarray   # (trials,) max_k |y_hat - reference|
    truncation_free: np.ndarray  # (trials,) bool: no waiting time was capped
    last_coordinate_error: np.ndarray  # (trials,) |y_hat_{n-1} - 2 ln n / n|

    @property
    def median_deviation(self) -> float:
        return float(np.median(self.deviations))

    @property
    def truncation_free_rate(self) -> float:
        return float(self.truncation_free.mean())

    def last_within_rate(self, bound: float) -> float:
        return float((self.last_coordinate_error <= bound).mean())


def trajectory_experiment(n: int, trials: int, seed: int) -> TrajectoryExperiment:
    """Grow foremost trees on complete samples and collect trajectories.

    Per trial: sample a complete graph, grow the foremost tree from vertex
    0 (complete graphs make every vertex a source, so the pre-check is
    skipped), truncate the trajectory at the standard caps, and record the
    deviation from the reference curve plus the final-coordinate error
    against ``2 ln n / n``.
    """
    if n < 3:
        raise ValueError("trajectory experiments need n >= 3")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    caps = truncation_caps(n)
    ref = reference_curve_points(n)
    target = 2.0 * math.log(n) / n
    y = np.empty((trials, n - 1))
    y_hat = np.empty((trials, n - 1))
    devs = np.empty(trials)
    free = np.empty(trials, dtype=bool)
    last_err = np.empty(trials)
    for t in range(trials):
        g = sample_complete(n, RngStream(seed, t))
        tree = foremost_tree(g, 0, trusted=True)
        traj = truncate_trajectory(Trajectory.from_tree(tree), caps)
        y[t] = traj.y[1:]
        y_hat[t] = traj.y_hat[1:]
        devs[t] = trajectory_deviation(traj)
        free[t] = traj.truncation_free
        last_err[t] = abs(traj.y_hat[-1] - target)
    return TrajectoryExperiment(n=n, trials=trials, seed=seed, y=y,
                                y_hat=y_hat, reference=ref, deviations=devs,
                                truncation_free=free,
                                last_coordinate_error=last_err)
