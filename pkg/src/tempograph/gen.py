"""Seeded samplers for random temporal graphs and gossip call sequences.

All samplers are pure functions of an :class:`RngStream`: the same
``(master_seed, stream_id)`` pair always yields the same sample, regardless
of execution order or thread assignment.  Streams are backed by the Philox
4x64 counter-based generator keyed directly with the two seed words; this
derivation is part of the package's reproducibility contract and is fixed
for a given package version.

Models:

* ``sample_fnp(n, p)`` — each of the C(n,2) vertex pairs appears
  independently with probability ``p`` and carries one label uniform on
  ``[0, p]`` (window ``[0, p]``).
* ``sample_complete(n)`` — all pairs, labels i.i.d. uniform on ``[0, 1]``;
  induces a uniformly random edge ordering.
* ``sample_poisson(n, p)`` — per pair, a rate-1 Poisson point process on
  ``[0, p]``: labels accumulate Exp(1) gaps until the running sum passes
  ``p``.  Edges may carry several labels or none.
* ``co_call_sequence(n)`` — a uniformly random permutation of all pairs
  (the call-once schedule).
* ``any_call_sequence(n, max_calls)`` — i.i.d. uniform pairs with
  replacement (the unrestricted schedule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TemporalGraph

__all__ = [
    "RngStream",
    "CallSequence",
    "sample_fnp",
    "sample_complete",
    "sample_poisson",
    "co_call_sequence",
    "any_call_sequence",
    "COMPLETE_VERTEX_CAP",
]

_MASK64 = (1 << 64) - 1

# sample_complete materialises all C(n,2) edges; beyond this the sparse
# sampler should be used instead.  Overridable per call.
COMPLETE_VERTEX_CAP = 8000

# fixed draw-batch size for the sparse geometric-skip sampler; part of the
# versioned stream-derivation contract (changing it changes outputs)
_GEOM_BATCH_PAD = 64


@dataclass(frozen=True)
class RngStream:
    """Handle for one reproducible random stream.

    ``stream_id`` conventionally carries the trial index; sweeps pack
    ``factor_index * 2**32 + trial`` so that every (grid point, trial) cell
    is independently reproducible.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh Philox generator keyed by (master_seed, stream_id)."""
        key = [self.master_seed & _MASK64, self.stream_id & _MASK64]
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class CallSequence:
    """An ordered list of unordered agent pairs (gossip call schedule)."""

    n: int
    calls_u: np.ndarray
    calls_v: np.ndarray

    def __len__(self):
        return int(self.calls_u.size)

    def __iter__(self):
        for a, b in zip(self.calls_u, self.calls_v):
            yield (int(a), int(b))

    def pair(self, i: int):
        return (int(self.calls_u[i]), int(self.calls_v[i]))


def _num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def _pair_start(i, n):
    # linear index of the first pair (i, i+1) in row-major upper triangle
    return i * (2 * n - i - 1) // 2


def decode_pairs(idx: np.ndarray, n: int):
    """Map linear pair indices to ``(u, v)`` with ``u < v`` (vectorised)."""
    idx = np.asarray(idx, dtype=np.int64)
    b = 2 * n - 1
    u = ((b - np.sqrt(b * b - 8.0 * idx)) / 2.0).astype(np.int64)
    # one ulp of float error can land one row off; fix both directions
    for _ in range(2):
        u = np.where(_pair_start(u + 1, n) <= idx, u + 1, u)
        u = np.where(_pair_start(u, n) > idx, u - 1, u)
    v = idx - _pair_start(u, n) + u + 1
    return u.astype(np.int32), v.astype(np.int32)


def _all_pairs(n: int):
    counts = np.arange(n - 1, 0, -1)
    u = np.repeat(np.arange(n - 1, dtype=np.int32), counts)
    starts = np.zeros(n - 1, dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])
    v = (np.arange(_num_pairs(n), dtype=np.int64) - starts[u]) + u + 1
    return u, v.astype(np.int32)


def sample_fnp(n: int, p: float, rng: RngStream) -> TemporalGraph:
    """Random simple temporal graph on window ``[0, p]``.

    Each pair is included independently with probability ``p``; an included
    edge's label is uniform on ``[0, p]``.  Inclusion and label come from a
    single uniform draw per pair (label U kept iff U < p), which makes the
    output distribution identical to restricting a complete sample to
    ``[0, p]``.  For ``p < 0.1`` pairs are enumerated by geometric skipping
    so the cost is proportional to the expected edge count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    npairs = _num_pairs(n)
    gen = rng.generator()
    if p == 0.0 or npairs == 0:
        e = np.empty(0)
        return TemporalGraph(n, (0.0, p), e, e, e, validate=False,
                             presorted=True)

    if p < 0.1:
        # geometric gaps over the linearised pair index
        idx_parts = []
        pos = -1
        remaining = npairs
        while remaining > 0:
            mean = remaining * p
            size = int(mean + 6.0 * math.sqrt(mean * (1.0 - p))) + _GEOM_BATCH_PAD
            gaps = gen.geometric(p, size=size)
            cum = np.cumsum(gaps) + pos
            take = cum < npairs
            idx_parts.append(cum[take])
            if not take.all():
                remaining = 0
            else:
                pos = int(cum[-1])
                remaining = npairs - 1 - pos
        idx = np.concatenate(idx_parts) if idx_parts else np.empty(0, np.int64)
        u, v = decode_pairs(idx, n)
        t = gen.random(idx.size) * p
        return TemporalGraph(n, (0.0, p), u, v, t, validate=False,
                             presorted=True)

    draws = gen.random(npairs)
    mask = draws < p
    idx = np.flatnonzero(mask)
    u, v = decode_pairs(idx, n)
    return TemporalGraph(n, (0.0, p), u, v, draws[mask], validate=False,
                         presorted=True)


def sample_complete(n: int, rng: RngStream, *,
                    vertex_cap: int = COMPLETE_VERTEX_CAP) -> TemporalGraph:
    """Complete temporal graph: all pairs, labels i.i.d. uniform on [0, 1].

    Refuses ``n`` above ``vertex_cap`` (the edge arrays grow quadratically);
    use the sparse ``sample_fnp`` for threshold sweeps at large ``n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > vertex_cap:
        raise ValueError(
            f"n={n} exceeds the complete-graph cap {vertex_cap}; "
            "raise the cap explicitly or sample sparsely with sample_fnp")
    gen = rng.generator()
    npairs = _num_pairs(n)
    t = gen.random(npairs)
    u, v = _all_pairs(n)
    return TemporalGraph(n, (0.0, 1.0), u, v, t, validate=False,
                         presorted=True)


def sample_poisson(n: int, p: float, rng: RngStream) -> TemporalGraph:
    """Multi-label temporal graph from per-pair rate-1 Poisson processes.

    Every pair accumulates i.i.d. Exp(1) inter-arrival gaps (inverse-CDF,
    one uniform per gap) and keeps the partial sums that stay within
    ``[0, p]``; pairs whose first arrival already exceeds ``p`` are absent.
    Expected labels per edge equal ``p``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if p < 0.0:
        raise ValueError(f"p={p} must be >= 0")
    npairs = _num_pairs(n)
    gen = rng.generator()
    if p == 0.0 or npairs == 0:
        e = np.empty(0)
        return TemporalGraph(n, (0.0, p), e, e, e, validate=False,
                             presorted=True)

    active = np.arange(npairs, dtype=np.int64)
    clock = np.zeros(npairs)
    idx_parts, lab_parts = [], []
    while active.size:
        gaps = -np.log1p(-gen.random(active.size))
        clock = clock + gaps
        alive = clock <= p
        if alive.any():
            idx_parts.append(active[alive])
            lab_parts.append(clock[alive])
        active = active[alive]
        clock = clock[alive]
    if idx_parts:
        idx = np.concatenate(idx_parts)
        lab = np.concatenate(lab_parts)
        order = np.lexsort((lab, idx))
        idx, lab = idx[order], lab[order]
    else:
        idx = np.empty(0, np.int64)
        lab = np.empty(0)
    u, v = decode_pairs(idx, n)
    return TemporalGraph(n, (0.0, p), u, v, lab, validate=False,
                         presorted=True)


def co_call_sequence(n: int, rng: RngStream) -> CallSequence:
    """Uniformly random permutation of all C(n,2) pairs (call-once model).

    Ranking the edges of ``sample_complete(n)`` by label yields the same
    distribution of orderings.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    gen = rng.generator()
    perm = gen.permutation(_num_pairs(n))
    u, v = decode_pairs(perm, n)
    return CallSequence(n, u, v)


def any_call_sequence(n: int, max_calls: int, rng: RngStream) -> CallSequence:
    """``max_calls`` i.i.d. uniform pair draws with replacement."""
    if n < 2:
        raise ValueError("need at least 2 agents")
    if max_calls < 0:
        raise ValueError("max_calls must be >= 0")
    gen = rng.generator()
    idx = gen.integers(0, _num_pairs(n), size=max_calls)
    u, v = decode_pairs(idx, n)
    return CallSequence(n, u, v)
