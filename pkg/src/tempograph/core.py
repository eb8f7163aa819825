"""Temporal graphs with real-valued edge labels and reachability primitives.

A temporal graph is an undirected graph whose edges carry one or more
presence times (labels).  Reachability follows time-respecting paths:
successive edge labels along a path must be non-decreasing, and the arrival
time of a path is its last label.  This module owns the graph
representation, interval restriction, time reversal, an event-sweep oracle
that computes earliest (foremost) arrival times from a source, and the
predicates derived from it: temporal source/sink, temporal connectivity,
spanner verification, and the two-hop source check.

All operations are pure functions over immutable graphs; a TemporalGraph is
safe for concurrent reads after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from numba import njit

__all__ = [
    "TemporalGraph",
    "TemporalPath",
    "ArrivalMap",
    "restrict",
    "reverse_time",
    "earliest_arrival_sweep",
    "is_temporal_source",
    "is_temporal_sink",
    "temporal_source_exists",
    "is_temporally_connected",
    "verify_spanner",
    "two_hop_source_check",
    "read_graph",
    "write_graph",
]


class TemporalGraph:
    """Immutable undirected temporal graph on vertices ``0..n-1``.

    Appearances are stored as flat arrays ``(u, v, t)`` sorted by
    ``(u, v, t)`` with canonical orientation ``u < v``; the labels of each
    edge form a strictly ascending run.  Two derived views are built lazily
    and cached: a flat event array sorted by ``(t, u, v)`` (the total event
    order used by every sweep) and a CSR adjacency indexed by vertex with
    per-neighbour labels ascending.

    Parameters
    ----------
    n : vertex count.
    window : closed time interval ``(a, b)``; every label must lie inside.
    u, v, t : appearance arrays (one row per (edge, label) appearance).
    validate : verify all structural invariants (default True).
    presorted : skip canonicalisation/sorting when the caller guarantees
        canonical ``(u, v, t)`` order.
    """

    __slots__ = ("n", "window", "_u", "_v", "_t", "_num_edges",
                 "_events", "_adj", "_pair_index")

    def __init__(self, n, window, u, v, t, *, validate=True, presorted=False):
        self.n = int(n)
        a, b = float(window[0]), float(window[1])
        if self.n < 1:
            raise ValueError("vertex count must be >= 1")
        if not a <= b:
            raise ValueError(f"invalid window [{a}, {b}]")
        self.window = (a, b)

        u = np.asarray(u, dtype=np.int32)
        v = np.asarray(v, dtype=np.int32)
        t = np.asarray(t, dtype=np.float64)
        if not (u.shape == v.shape == t.shape) or u.ndim != 1:
            raise ValueError("appearance arrays must be 1-d and equally long")

        if not presorted:
            u, v = np.minimum(u, v), np.maximum(u, v)
            order = np.lexsort((t, v, u))
            u, v, t = u[order], v[order], t[order]
        self._u, self._v, self._t = u, v, t

        same = np.empty(0, dtype=bool)
        if u.size > 1:
            same = (u[1:] == u[:-1]) & (v[1:] == v[:-1])
        self._num_edges = int(u.size - same.sum()) if u.size else 0

        if validate:
            if u.size:
                if int(u.min()) < 0 or int(v.max()) >= self.n:
                    raise ValueError("vertex id out of range")
                if np.any(u == v):
                    raise ValueError("self-loops are not allowed")
                if np.any(t < a) or np.any(t > b):
                    raise ValueError("label outside the graph window")
                # strictly ascending labels within each edge, one key per pair
                if same.size and np.any(t[1:][same] <= t[:-1][same]):
                    raise ValueError("per-edge labels must be strictly ascending")

        self._events = None
        self._adj = None
        self._pair_index = None

    # -- basic accessors ---------------------------------------------------

    @property
    def num_edges(self) -> int:
        """Number of distinct underlying edges."""
        return self._num_edges

    @property
    def num_appearances(self) -> int:
        """Total number of (edge, label) appearances."""
        return self._u.size

    @property
    def is_simple(self) -> bool:
        """True iff every edge carries exactly one label."""
        return self._num_edges == self._u.size

    def appearances(self):
        """Flat ``(u, v, t)`` arrays in canonical ``(u, v, t)`` order."""
        return self._u, self._v, self._t

    def edge_labels(self, u: int, v: int) -> np.ndarray:
        """Labels of edge ``{u, v}`` in ascending order (empty if absent)."""
        a, b = (u, v) if u < v else (v, u)
        lo, hi = self._pair_span(a, b)
        return self._t[lo:hi].copy()

    def has_edge(self, u: int, v: int) -> bool:
        a, b = (u, v) if u < v else (v, u)
        lo, hi = self._pair_span(a, b)
        return hi > lo

    def edge_dict(self) -> dict:
        """Mapping ``(u, v) -> list of labels`` (u < v), for interop/tests."""
        out: dict = {}
        u, v, t = self._u, self._v, self._t
        i, m = 0, u.size
        while i < m:
            j = i + 1
            while j < m and u[j] == u[i] and v[j] == v[i]:
                j += 1
            out[(int(u[i]), int(v[i]))] = [float(x) for x in t[i:j]]
            i = j
        return out

    def _pair_span(self, a: int, b: int):
        # binary search over the (u, v)-sorted appearance arrays
        keys = self._u.astype(np.int64) * self.n + self._v
        key = a * self.n + b
        lo = int(np.searchsorted(keys, key, side="left"))
        hi = int(np.searchsorted(keys, key, side="right"))
        return lo, hi

    # -- cached derived views ----------------------------------------------

    def events(self):
        """Appearances sorted by the total event order ``(t, u, v)``."""
        if self._events is None:
            order = np.argsort(self._t, kind="stable")
            self._events = (self._t[order], self._u[order], self._v[order])
        return self._events

    def adjacency(self):
        """CSR adjacency: ``(indptr, nbr, lab)`` with both edge directions.

        Entries of vertex ``x`` are sorted by (neighbour, label), so the
        appearances of each incident edge form a contiguous ascending run.
        Built without a full lexsort: the base ``(u, v, t)`` order already
        provides the u-side runs, and since ``u < v`` everywhere, a vertex's
        smaller neighbours (v-side) always precede its larger ones (u-side).
        """
        if self._adj is None:
            n, m = self.n, self._u.size
            u, v, t = self._u, self._v, self._t
            cv = np.bincount(v, minlength=n)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(u, minlength=n) + cv, out=indptr[1:])
            nbr = np.empty(2 * m, dtype=np.int32)
            lab = np.empty(2 * m, dtype=np.float64)
            if m:
                pos = (indptr[:-1] + cv)[u] + _run_index(u)
                nbr[pos] = v
                lab[pos] = t
                order = np.argsort(v, kind="stable")
                vs = v[order]
                pos = indptr[:-1][vs] + _run_index(vs)
                nbr[pos] = u[order]
                lab[pos] = t[order]
            self._adj = (indptr, nbr, lab)
        return self._adj

    def pair_label_map(self) -> dict:
        """Cached ``(u, v) -> label array`` lookup (u < v)."""
        if self._pair_index is None:
            self._pair_index = {}
            u, v, t = self._u, self._v, self._t
            i, m = 0, u.size
            while i < m:
                j = i + 1
                while j < m and u[j] == u[i] and v[j] == v[i]:
                    j += 1
                self._pair_index[(int(u[i]), int(v[i]))] = t[i:j]
                i = j
        return self._pair_index

    def __repr__(self):
        kind = "simple" if self.is_simple else "multi"
        return (f"TemporalGraph(n={self.n}, edges={self.num_edges}, "
                f"appearances={self.num_appearances}, {kind}, "
                f"window=[{self.window[0]:g}, {self.window[1]:g}])")


def _run_index(sorted_vals: np.ndarray) -> np.ndarray:
    """Position of each element within its run of equal values."""
    m = sorted_vals.size
    idx = np.arange(m, dtype=np.int64)
    new = np.empty(m, dtype=bool)
    new[0] = True
    np.not_equal(sorted_vals[1:], sorted_vals[:-1], out=new[1:])
    return idx - np.maximum.accumulate(np.where(new, idx, 0))


@dataclass(frozen=True)
class TemporalPath:
    """A time-respecting path: distinct vertices, non-decreasing labels."""

    vertices: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.vertices) != len(self.labels) + 1:
            raise ValueError("need exactly one label per hop")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("path vertices must be distinct")
        if any(b < a for a, b in zip(self.labels, self.labels[1:])):
            raise ValueError("path labels must be non-decreasing")

    @property
    def arrival_time(self) -> Optional[float]:
        """Last label of the path; None for the trivial single-vertex path."""
        return self.labels[-1] if self.labels else None

    def __len__(self):
        return len(self.labels)


class ArrivalMap:
    """Earliest arrival times from a source, with witness predecessors.

    Unreachable vertices have no entry: ``get`` returns None and
    ``__getitem__`` raises, so no sentinel value can leak into statistics.
    The source's arrival is the window start by convention.
    """

    __slots__ = ("source", "n", "_times", "_parent")

    def __init__(self, source, n, times, parent):
        self.source = int(source)
        self.n = int(n)
        self._times = times
        self._parent = parent

    def reached(self, v: int) -> bool:
        return bool(np.isfinite(self._times[v]))

    def get(self, v: int) -> Optional[float]:
        t = self._times[v]
        return float(t) if np.isfinite(t) else None

    def __getitem__(self, v: int) -> float:
        t = self._times[v]
        if not np.isfinite(t):
            raise KeyError(f"vertex {v} is unreachable from {self.source}")
        return float(t)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and self.reached(v)

    @property
    def reached_mask(self) -> np.ndarray:
        return np.isfinite(self._times)

    @property
    def reached_count(self) -> int:
        return int(np.isfinite(self._times).sum())

    @property
    def all_reached(self) -> bool:
        return self.reached_count == self.n

    def as_dict(self) -> dict:
        return {int(v): float(self._times[v])
                for v in np.flatnonzero(np.isfinite(self._times))}

    def path_to(self, v: int) -> TemporalPath:
        """Reconstruct a witness path to ``v`` from the predecessor links."""
        if not self.reached(v):
            raise KeyError(f"vertex {v} is unreachable from {self.source}")
        verts = [int(v)]
        labs = []
        while verts[-1] != self.source:
            w = verts[-1]
            labs.append(float(self._times[w]))
            verts.append(int(self._parent[w]))
        return TemporalPath(tuple(reversed(verts)), tuple(reversed(labs)))


# -- numba kernels ----------------------------------------------------------
#
# Events are processed in ascending (label, edge) order.  Within a run of
# exactly equal labels the relaxation is iterated to a fixpoint, so chains of
# equal-label hops (legal for non-decreasing paths) are never missed; equal
# labels have probability zero under the random models but occur in
# hand-built instances.


@njit(cache=True, nogil=True)
def _sweep_kernel(lab, eu, ev, n, src, t0, blocked):
    arr = np.full(n, np.inf)
    par = np.full(n, -1, np.int32)
    arr[src] = t0
    m = lab.size
    i = 0
    while i < m:
        j = i + 1
        while j < m and lab[j] == lab[i]:
            j += 1
        if j - i == 1:
            t = lab[i]
            a = eu[i]
            b = ev[i]
            if blocked[a] == 0 and blocked[b] == 0:
                if arr[a] <= t and t < arr[b]:
                    arr[b] = t
                    par[b] = a
                elif arr[b] <= t and t < arr[a]:
                    arr[a] = t
                    par[a] = b
        else:
            changed = True
            while changed:
                changed = False
                for k in range(i, j):
                    t = lab[k]
                    a = eu[k]
                    b = ev[k]
                    if blocked[a] != 0 or blocked[b] != 0:
                        continue
                    if arr[a] <= t and t < arr[b]:
                        arr[b] = t
                        par[b] = a
                        changed = True
                    if arr[b] <= t and t < arr[a]:
                        arr[a] = t
                        par[a] = b
                        changed = True
        i = j
    return arr, par


@njit(cache=True, nogil=True)
def _reach_count(lab, eu, ev, n, src, t0, arr):
    # Count-only sweep with early exit once everything is reached; `arr` is
    # caller-provided scratch.  A vertex's arrival is assigned at most once
    # because events arrive in ascending label order.
    for q in range(n):
        arr[q] = np.inf
    arr[src] = t0
    cnt = 1
    if cnt == n:
        return cnt
    m = lab.size
    i = 0
    while i < m:
        j = i + 1
        while j < m and lab[j] == lab[i]:
            j += 1
        if j - i == 1:
            t = lab[i]
            a = eu[i]
            b = ev[i]
            if arr[a] <= t and t < arr[b]:
                arr[b] = t
                cnt += 1
            elif arr[b] <= t and t < arr[a]:
                arr[a] = t
                cnt += 1
        else:
            changed = True
            while changed:
                changed = False
                for k in range(i, j):
                    t = lab[k]
                    a = eu[k]
                    b = ev[k]
                    if arr[a] <= t and t < arr[b]:
                        arr[b] = t
                        cnt += 1
                        changed = True
                    if arr[b] <= t and t < arr[a]:
                        arr[a] = t
                        cnt += 1
                        changed = True
        if cnt == n:
            return cnt
        i = j
    return cnt


@njit(cache=True, nogil=True)
def _all_vertices_reach_all(lab, eu, ev, n, t0):
    arr = np.empty(n)
    for v in range(n):
        if _reach_count(lab, eu, ev, n, v, t0, arr) < n:
            return False
    return True


@njit(cache=True, nogil=True)
def _some_vertex_reaches_all(lab, eu, ev, n, t0):
    arr = np.empty(n)
    for v in range(n):
        if _reach_count(lab, eu, ev, n, v, t0, arr) == n:
            return True
    return False


_NO_BLOCK = np.zeros(0, dtype=np.uint8)


def _blocked_mask(n, blocked):
    mask = np.zeros(n, dtype=np.uint8)
    if blocked is not None:
        for x in blocked:
            mask[x] = 1
    return mask


# -- operations --------------------------------------------------------------


def restrict(g: TemporalGraph, a: float, b: float) -> TemporalGraph:
    """Restriction of ``g`` to the closed time interval ``[a, b]``.

    Keeps exactly the labels inside ``[a, b]``; edges left with no label are
    dropped.  The vertex set is unchanged and the new window is ``[a, b]``.
    """
    a, b = float(a), float(b)
    if not (g.window[0] <= a <= b <= g.window[1]):
        raise ValueError(
            f"restriction [{a}, {b}] not contained in window "
            f"[{g.window[0]}, {g.window[1]}]")
    u, v, t = g.appearances()
    mask = (t >= a) & (t <= b)
    return TemporalGraph(g.n, (a, b), u[mask], v[mask], t[mask],
                         validate=False, presorted=True)


def reverse_time(g: TemporalGraph) -> TemporalGraph:
    """Mirror ``g`` in time: label ``t`` becomes ``a + b - t`` on window [a, b].

    Sources of ``g`` are sinks of the reversed graph and vice versa.  The
    mapped labels are clipped to the window to absorb one-ulp float drift.
    """
    a, b = g.window
    u, v, t = g.appearances()
    t2 = np.clip((a + b) - t, a, b)
    order = np.lexsort((t2, v, u))
    return TemporalGraph(g.n, (a, b), u[order], v[order], t2[order],
                         validate=False, presorted=True)


def earliest_arrival_sweep(g: TemporalGraph, v: int,
                           blocked=None) -> ArrivalMap:
    """Foremost arrival time of every vertex from ``v``.

    Processes all (edge, label) events in ascending (label, edge) order,
    relaxing an endpoint whenever the other endpoint was reached no later
    than the event's label.  ``blocked`` optionally names vertices treated
    as absent.  Returns an ArrivalMap with witness predecessor links.
    """
    if not 0 <= v < g.n:
        raise ValueError(f"source {v} out of range for n={g.n}")
    lab, eu, ev = g.events()
    mask = _blocked_mask(g.n, blocked) if blocked is not None else \
        np.zeros(g.n, dtype=np.uint8)
    arr, par = _sweep_kernel(lab, eu, ev, g.n, v, g.window[0], mask)
    return ArrivalMap(v, g.n, arr, par)


def is_temporal_source(g: TemporalGraph, v: int) -> bool:
    """True iff every vertex is reachable from ``v`` by a temporal path."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for n={g.n}")
    lab, eu, ev = g.events()
    arr = np.empty(g.n)
    return _reach_count(lab, eu, ev, g.n, v, g.window[0], arr) == g.n


def is_temporal_sink(g: TemporalGraph, v: int) -> bool:
    """True iff every vertex can reach ``v`` by a temporal path."""
    return is_temporal_source(reverse_time(g), v)


def temporal_source_exists(g: TemporalGraph) -> bool:
    """True iff at least one vertex is a temporal source of ``g``."""
    lab, eu, ev = g.events()
    return bool(_some_vertex_reaches_all(lab, eu, ev, g.n, g.window[0]))


def is_temporally_connected(g: TemporalGraph) -> bool:
    """True iff every ordered vertex pair is joined by a temporal path."""
    lab, eu, ev = g.events()
    return bool(_all_vertices_reach_all(lab, eu, ev, g.n, g.window[0]))


def verify_spanner(g: TemporalGraph, appearances) -> bool:
    """Check that a set of (edge, label) appearances temporally spans ``g``.

    ``appearances`` is an iterable of ``(u, v, t)`` triples, each of which
    must be an appearance of ``g`` (exact label match); otherwise a
    ValueError is raised.  Returns True iff the temporal subgraph induced by
    exactly these appearances, on all ``g.n`` vertices, is temporally
    connected.
    """
    triples = [(int(u), int(v), float(t)) for (u, v, t) in appearances]
    if triples:
        pairs = g.pair_label_map()
        for u, v, t in triples:
            a, b = (u, v) if u < v else (v, u)
            labs = pairs.get((a, b))
            if labs is None or not np.any(labs == t):
                raise ValueError(
                    f"appearance ({u}, {v}, {t!r}) is not present in the graph")
        su = np.array([min(u, v) for u, v, _ in triples], dtype=np.int32)
        sv = np.array([max(u, v) for u, v, _ in triples], dtype=np.int32)
        st = np.array([t for _, _, t in triples], dtype=np.float64)
    else:
        su = np.empty(0, dtype=np.int32)
        sv = np.empty(0, dtype=np.int32)
        st = np.empty(0, dtype=np.float64)
    sub = TemporalGraph(g.n, g.window, su, sv, st, validate=False)
    return is_temporally_connected(sub)


def two_hop_source_check(g: TemporalGraph, v: int) -> bool:
    """True iff ``v`` reaches every other vertex by a path of length 1 or 2.

    A sufficient condition for ``v`` being a temporal source (never
    necessary): each target is a direct neighbour, or some intermediate
    ``y`` satisfies min-label(vy) <= label(yz).
    """
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for n={g.n}")
    n = g.n
    if n == 1:
        return True
    u, w, t = g.appearances()
    first_hop = np.full(n, np.inf)
    mu = u == v
    mw = w == v
    if mu.any():
        np.minimum.at(first_hop, w[mu], t[mu])
    if mw.any():
        np.minimum.at(first_hop, u[mw], t[mw])
    reach = np.isfinite(first_hop)
    reach[v] = True
    rest = ~(mu | mw)
    ru, rw, rt = u[rest], w[rest], t[rest]
    ok = first_hop[ru] <= rt
    reach[rw[ok]] = True
    ok = first_hop[rw] <= rt
    reach[ru[ok]] = True
    return bool(reach.all())


# -- text format --------------------------------------------------------------
#
# Line 1: "n <count>", then one line "u v t" per appearance with 0-based
# vertex ids and a decimal label.  Lines starting with '#' are comments.
# Appearances of the same pair aggregate into one multi-labelled edge.


def write_graph(g: TemporalGraph, fh: Union[str, IO], header: str = "") -> None:
    """Write ``g`` in the plain text appearance format."""
    own = isinstance(fh, str)
    out = open(fh, "w", encoding="utf-8", newline="\n") if own else fh
    try:
        if header:
            for line in header.splitlines():
                out.write(f"# {line}\n")
        out.write(f"n {g.n}\n")
        u, v, t = g.appearances()
        for i in range(u.size):
            out.write(f"{u[i]} {v[i]} {float(t[i])!r}\n")
    finally:
        if own:
            out.close()


def read_graph(fh: Union[str, IO], window=None) -> TemporalGraph:
    """Parse the plain text appearance format.

    When ``window`` is omitted it is inferred as ``[0, max(1, max label)]``.
    """
    own = isinstance(fh, str)
    inp = open(fh, "r", encoding="utf-8") if own else fh
    try:
        n = None
        us, vs, ts = [], [], []
        for ln, raw in enumerate(inp, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if n is None:
                parts = line.split()
                if len(parts) != 2 or parts[0] != "n":
                    raise ValueError(f"line {ln}: expected 'n <count>'")
                n = int(parts[1])
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {ln}: expected 'u v t'")
            us.append(int(parts[0]))
            vs.append(int(parts[1]))
            ts.append(float(parts[2]))
        if n is None:
            raise ValueError("missing 'n <count>' header line")
    finally:
        if own:
            inp.close()
    ts_arr = np.asarray(ts, dtype=np.float64)
    if window is None:
        hi = float(max(1.0, ts_arr.max())) if ts_arr.size else 1.0
        window = (0.0, hi)
    return TemporalGraph(n, window, np.asarray(us, dtype=np.int32),
                         np.asarray(vs, dtype=np.int32), ts_arr)
