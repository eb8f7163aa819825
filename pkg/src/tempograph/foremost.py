"""Foremost trees and the growth trajectory of their edge labels.

A foremost tree for a source ``v`` is a spanning increasing temporal tree
whose root-to-vertex paths realise the earliest possible arrival time at
every vertex.  It is grown greedily: among all cut edges whose addition
keeps the tree increasing, always attach the one with the smallest label.
The sequence of attached labels ``Y_1 <= ... <= Y_{n-1}`` is the tree's
trajectory; on complete random inputs it concentrates around the curve
``sum_i 1/(i(n-i)+1)`` once the per-step waiting times are truncated at the
caps computed by :func:`truncation_caps`.

The growth loop keeps, per vertex outside the tree, its best currently
eligible incident appearance in a binary heap and lazily discards stale
entries on pop; eligibility of an appearance never changes once its inside
endpoint has joined, so each appearance is examined at most twice and
pushed at most once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .core import TemporalGraph, earliest_arrival_sweep, reverse_time

__all__ = [
    "ForemostTree",
    "Trajectory",
    "NotTemporalSourceError",
    "foremost_tree",
    "foremost_tree_multilabel",
    "reverse_foremost_tree",
    "truncation_caps",
    "truncate_trajectory",
    "reference_curve",
    "trajectory_deviation",
]


class NotTemporalSourceError(ValueError):
    """Raised when tree growth stalls: the root is not a temporal source."""

    def __init__(self, message, step=None, reached=None):
        super().__init__(message)
        self.step = step
        self.reached = reached


@dataclass
class ForemostTree:
    """Rooted spanning temporal tree in attach order.

    ``parent[w]`` / ``parent_label[w]`` give the tree edge into ``w``
    (-1 / NaN at the root); ``attach_order`` lists the non-root vertices in
    the order the growth loop added them, and ``trajectory`` holds the
    corresponding edge labels ``Y_1..Y_{n-1}``.  For reverse (decreasing)
    trees the trajectory stays in reversed time units while
    ``parent_label`` is mapped back to the original labels.
    """

    root: int
    n: int
    window: tuple
    parent: np.ndarray
    parent_label: np.ndarray
    attach_order: np.ndarray
    trajectory: np.ndarray
    reverse: bool = False

    def arrival_times(self) -> np.ndarray:
        """Per-vertex arrival along the tree (root gets the window start)."""
        arr = self.parent_label.copy()
        arr[self.root] = self.window[0]
        return arr

    def edges(self):
        """Tree edges ``(parent, child, label)`` in attach order."""
        return [(int(self.parent[w]), int(w), float(self.parent_label[w]))
                for w in self.attach_order]

    def appearances(self):
        """Canonical ``(u, v, label)`` triples of the tree's edges."""
        out = []
        for p, w, t in self.edges():
            a, b = (p, w) if p < w else (w, p)
            out.append((a, b, t))
        return out


@dataclass
class Trajectory:
    """Edge-label trajectory of one foremost tree run.

    ``y`` has length ``n`` with ``y[0] = 0`` (window start); ``x`` holds the
    waiting times ``Y_k - Y_{k-1}``.  After :func:`truncate_trajectory`,
    ``x_hat``/``y_hat`` carry the capped versions.
    """

    n: int
    y: np.ndarray
    x: np.ndarray
    caps: Optional[np.ndarray] = None
    x_hat: Optional[np.ndarray] = None
    y_hat: Optional[np.ndarray] = None

    @classmethod
    def from_tree(cls, tree: ForemostTree) -> "Trajectory":
        y = np.empty(tree.n)
        y[0] = tree.window[0]
        y[1:] = tree.trajectory
        return cls(n=tree.n, y=y, x=np.diff(y))

    @property
    def truncation_free(self) -> bool:
        """True iff no waiting time exceeded its cap (so y_hat equals y)."""
        if self.caps is None:
            raise ValueError("trajectory has not been truncated")
        return bool(np.all(self.x <= self.caps))


# -- growth kernel -----------------------------------------------------------


@njit(cache=True)
def _less(t1, u1, v1, t2, u2, v2):
    # total candidate order: (label, canonical edge id)
    if t1 != t2:
        return t1 < t2
    if u1 != u2:
        return u1 < u2
    return v1 < v2


@njit(cache=True)
def _push(h_t, h_u, h_v, h_x, h_y, size, t, cu, cv, fx, ty):
    i = size
    h_t[i] = t
    h_u[i] = cu
    h_v[i] = cv
    h_x[i] = fx
    h_y[i] = ty
    while i > 0:
        p = (i - 1) >> 1
        if _less(h_t[i], h_u[i], h_v[i], h_t[p], h_u[p], h_v[p]):
            h_t[i], h_t[p] = h_t[p], h_t[i]
            h_u[i], h_u[p] = h_u[p], h_u[i]
            h_v[i], h_v[p] = h_v[p], h_v[i]
            h_x[i], h_x[p] = h_x[p], h_x[i]
            h_y[i], h_y[p] = h_y[p], h_y[i]
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _pop(h_t, h_u, h_v, h_x, h_y, size):
    last = size - 1
    h_t[0] = h_t[last]
    h_u[0] = h_u[last]
    h_v[0] = h_v[last]
    h_x[0] = h_x[last]
    h_y[0] = h_y[last]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= last:
            break
        r = l + 1
        c = l
        if r < last and _less(h_t[r], h_u[r], h_v[r], h_t[l], h_u[l], h_v[l]):
            c = r
        if _less(h_t[c], h_u[c], h_v[c], h_t[i], h_u[i], h_v[i]):
            h_t[i], h_t[c] = h_t[c], h_t[i]
            h_u[i], h_u[c] = h_u[c], h_u[i]
            h_v[i], h_v[c] = h_v[c], h_v[i]
            h_x[i], h_x[c] = h_x[c], h_x[i]
            h_y[i], h_y[c] = h_y[c], h_y[i]
            i = c
        else:
            break
    return last


@njit(cache=True)
def _scan_joined(indptr, adj_v, adj_t, x, ax, in_tree,
                 best_t, best_u, best_v, h_t, h_u, h_v, h_x, h_y, size):
    # vertex x just joined with arrival ax: offer its earliest eligible
    # appearance towards every outside neighbour
    i = indptr[x]
    end = indptr[x + 1]
    while i < end:
        y = adj_v[i]
        j = i + 1
        while j < end and adj_v[j] == y:
            j += 1
        if in_tree[y] == 0:
            k = i
            while k < j and adj_t[k] < ax:
                k += 1
            if k < j:
                t = adj_t[k]
                if x < y:
                    cu, cv = x, y
                else:
                    cu, cv = y, x
                if _less(t, cu, cv, best_t[y], best_u[y], best_v[y]):
                    best_t[y] = t
                    best_u[y] = cu
                    best_v[y] = cv
                    size = _push(h_t, h_u, h_v, h_x, h_y, size, t, cu, cv, x, y)
        i = j
    return size


@njit(cache=True, nogil=True)
def _grow_tree_complete(labels, n, src, t0):
    # Complete simple graphs need no adjacency structure: the canonical
    # (u, v) appearance order makes the label of {a, b} (a < b) addressable
    # at a*(2n-a-1)//2 + (b-a-1).  Same growth loop as the general kernel.
    in_tree = np.zeros(n, np.uint8)
    arr = np.full(n, np.inf)
    par = np.full(n, -1, np.int32)
    par_t = np.full(n, np.nan)
    m = n - 1 if n > 1 else 0
    order = np.full(m, -1, np.int32)

    big = np.int32(2147483647)
    best_t = np.full(n, np.inf)
    best_u = np.full(n, big, np.int32)
    best_v = np.full(n, big, np.int32)

    cap = labels.size + 2
    h_t = np.empty(cap)
    h_u = np.empty(cap, np.int32)
    h_v = np.empty(cap, np.int32)
    h_x = np.empty(cap, np.int32)
    h_y = np.empty(cap, np.int32)
    size = 0

    x = src
    ax = t0
    in_tree[src] = 1
    arr[src] = t0
    cnt = 0
    while True:
        for y in range(n):
            if in_tree[y] == 0:
                if x < y:
                    cu, cv = x, y
                else:
                    cu, cv = y, x
                t = labels[cu * (2 * n - cu - 1) // 2 + (cv - cu - 1)]
                if t >= ax and _less(t, cu, cv, best_t[y], best_u[y], best_v[y]):
                    best_t[y] = t
                    best_u[y] = cu
                    best_v[y] = cv
                    size = _push(h_t, h_u, h_v, h_x, h_y, size, t, cu, cv, x, y)
        if cnt >= m:
            break
        ty = -1
        t = np.inf
        fx = -1
        while size > 0:
            t = h_t[0]
            fx = h_x[0]
            ty = h_y[0]
            size = _pop(h_t, h_u, h_v, h_x, h_y, size)
            if in_tree[ty] == 0:
                break
            ty = -1
        if ty < 0:
            return cnt, arr, par, par_t, order
        in_tree[ty] = 1
        arr[ty] = t
        par[ty] = fx
        par_t[ty] = t
        order[cnt] = ty
        cnt += 1
        x = ty
        ax = t
    return cnt, arr, par, par_t, order


@njit(cache=True, nogil=True)
def _grow_tree(indptr, adj_v, adj_t, n, src, t0):
    in_tree = np.zeros(n, np.uint8)
    arr = np.full(n, np.inf)
    par = np.full(n, -1, np.int32)
    par_t = np.full(n, np.nan)
    m = n - 1 if n > 1 else 0
    order = np.full(m, -1, np.int32)

    big = np.int32(2147483647)
    best_t = np.full(n, np.inf)
    best_u = np.full(n, big, np.int32)
    best_v = np.full(n, big, np.int32)

    cap = adj_v.size // 2 + 2
    h_t = np.empty(cap)
    h_u = np.empty(cap, np.int32)
    h_v = np.empty(cap, np.int32)
    h_x = np.empty(cap, np.int32)
    h_y = np.empty(cap, np.int32)
    size = 0

    in_tree[src] = 1
    arr[src] = t0
    size = _scan_joined(indptr, adj_v, adj_t, src, t0, in_tree,
                        best_t, best_u, best_v, h_t, h_u, h_v, h_x, h_y, size)
    cnt = 0
    while cnt < m:
        ty = -1
        t = np.inf
        fx = -1
        while size > 0:
            t = h_t[0]
            fx = h_x[0]
            ty = h_y[0]
            size = _pop(h_t, h_u, h_v, h_x, h_y, size)
            if in_tree[ty] == 0:
                break
            ty = -1
        if ty < 0:
            return cnt, arr, par, par_t, order
        in_tree[ty] = 1
        arr[ty] = t
        par[ty] = fx
        par_t[ty] = t
        order[cnt] = ty
        cnt += 1
        size = _scan_joined(indptr, adj_v, adj_t, ty, t, in_tree,
                            best_t, best_u, best_v,
                            h_t, h_u, h_v, h_x, h_y, size)
    return cnt, arr, par, par_t, order


# -- public operations --------------------------------------------------------


def _grow(g: TemporalGraph, v: int, trusted: bool) -> ForemostTree:
    if not 0 <= v < g.n:
        raise ValueError(f"root {v} out of range for n={g.n}")
    if not trusted:
        amap = earliest_arrival_sweep(g, v)
        if not amap.all_reached:
            k = amap.reached_count
            raise NotTemporalSourceError(
                f"{v} is not a temporal source: no eligible cut edge at "
                f"step {k + 1} ({k} of {g.n} vertices reachable)",
                step=k + 1, reached=k)
    if g.is_simple and g.num_edges == g.n * (g.n - 1) // 2:
        labels = g.appearances()[2]
        cnt, arr, par, par_t, order = _grow_tree_complete(labels, g.n, v,
                                                          g.window[0])
    else:
        indptr, adj_v, adj_t = g.adjacency()
        cnt, arr, par, par_t, order = _grow_tree(indptr, adj_v, adj_t,
                                                 g.n, v, g.window[0])
    if cnt < g.n - 1:
        raise NotTemporalSourceError(
            f"{v} is not a temporal source: no eligible cut edge at "
            f"step {cnt + 1} ({cnt + 1} of {g.n} vertices reachable)",
            step=cnt + 1, reached=cnt + 1)
    return ForemostTree(root=v, n=g.n, window=g.window, parent=par,
                        parent_label=par_t, attach_order=order,
                        trajectory=par_t[order].copy())


def foremost_tree(g: TemporalGraph, v: int, *, trusted: bool = False) -> ForemostTree:
    """Foremost tree for source ``v`` of a simple temporal graph.

    ``trusted=True`` skips the O(E) source pre-check when the caller has
    already established that ``v`` reaches everything (Monte Carlo hot
    path); growth still fails loudly if the precondition was wrong.
    """
    if not g.is_simple:
        raise ValueError(
            "foremost_tree requires a simple graph; "
            "use foremost_tree_multilabel for multi-labelled input")
    return _grow(g, v, trusted)


def foremost_tree_multilabel(g: TemporalGraph, v: int, *,
                             trusted: bool = False) -> ForemostTree:
    """Foremost tree on a (possibly) multi-labelled temporal graph.

    Each cut edge competes with the earliest of its labels that keeps the
    tree increasing; on simple input the result is identical to
    :func:`foremost_tree`.
    """
    return _grow(g, v, trusted)


def reverse_foremost_tree(g: TemporalGraph, v: int, *,
                          trusted: bool = False) -> ForemostTree:
    """Decreasing temporal tree along which every vertex reaches sink ``v``.

    Equivalent to growing a foremost tree from ``v`` in the time-reversed
    graph.  The trajectory is reported in reversed time units; the tree
    edges' ``parent_label`` values are mapped back to the original labels
    by exact per-edge lookup (never by float arithmetic), so the returned
    appearances are appearances of ``g``.
    """
    rg = reverse_time(g)
    rtree = _grow(rg, v, trusted)
    rpairs = rg.pair_label_map()
    gpairs = g.pair_label_map()
    mapped = rtree.parent_label.copy()
    for w in rtree.attach_order:
        p = int(rtree.parent[w])
        a, b = (p, int(w)) if p < w else (int(w), p)
        rlabs = rpairs[(a, b)]
        glabs = gpairs[(a, b)]
        i = int(np.searchsorted(rlabs, rtree.parent_label[w]))
        mapped[w] = glabs[len(glabs) - 1 - i]
    return ForemostTree(root=v, n=g.n, window=g.window, parent=rtree.parent,
                        parent_label=mapped, attach_order=rtree.attach_order,
                        trajectory=rtree.trajectory, reverse=True)


# -- trajectory instrumentation ------------------------------------------------


def truncation_caps(n: int) -> np.ndarray:
    """Waiting-time caps ``c_1..c_{n-1}``.

    ``c_k = (2 ln(min(k, n-k)) + ln ln n) / (k (n-k))``; natural logarithm
    throughout.  Requires ``n >= 3`` so that ``ln ln n`` is positive.
    """
    if n < 3:
        raise ValueError("truncation caps need n >= 3 (ln ln n degenerate)")
    k = np.arange(1, n, dtype=np.float64)
    return (2.0 * np.log(np.minimum(k, n - k)) + math.log(math.log(n))) \
        / (k * (n - k))


def truncate_trajectory(traj: Trajectory, caps: np.ndarray) -> Trajectory:
    """Cap the waiting times and accumulate the truncated trajectory."""
    caps = np.asarray(caps, dtype=np.float64)
    if caps.shape != traj.x.shape:
        raise ValueError(
            f"caps length {caps.size} does not match {traj.x.size} waiting times")
    x_hat = np.minimum(traj.x, caps)
    y_hat = np.empty_like(traj.y)
    y_hat[0] = traj.y[0]
    np.cumsum(x_hat, out=y_hat[1:])
    return Trajectory(n=traj.n, y=traj.y, x=traj.x, caps=caps,
                      x_hat=x_hat, y_hat=y_hat)


def reference_curve(n: int, k: int) -> float:
    """Partial sum ``sum_{i=1..k} 1/(i(n-i)+1)`` (0 for ``k = 0``)."""
    if not 0 <= k <= n - 1:
        raise ValueError(f"k={k} outside [0, {n - 1}]")
    if k == 0:
        return 0.0
    i = np.arange(1, k + 1, dtype=np.float64)
    return float(np.sum(1.0 / (i * (n - i) + 1.0)))


def reference_curve_points(n: int) -> np.ndarray:
    """Cumulative reference curve at ``k = 1..n-1`` (vectorised)."""
    i = np.arange(1, n, dtype=np.float64)
    return np.cumsum(1.0 / (i * (n - i) + 1.0))


def trajectory_deviation(traj: Trajectory) -> float:
    """Max over ``k`` of ``|y_hat_k - reference_curve(n, k)|``."""
    if traj.y_hat is None:
        raise ValueError("trajectory has not been truncated")
    if traj.n < 2:
        return 0.0
    ref = reference_curve_points(traj.n)
    return float(np.abs(traj.y_hat[1:] - ref).max())
