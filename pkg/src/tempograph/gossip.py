"""Rumor-spreading simulators with milestone detection.

``n`` agents each start with their own secret; a call between two agents
merges their secret sets.  The simulators replay a call schedule and record
the 1-based call index at which four milestone events first hold:

* ``pair_exchange`` — agents 0 and 1 each know the other's secret
  (both directions; the one-directional variant "agent 1 knows secret 0"
  is exposed as a diagnostic),
* ``first_expert``  — some agent knows all ``n`` secrets,
* ``fixed_expert``  — agent 0 knows all ``n`` secrets,
* ``all_experts``   — every agent knows all ``n`` secrets.

Secret sets are bitsets of ``ceil(n/64)`` 64-bit words; a call is a
word-wise OR plus one popcount, so full runs at ``n = 5000`` take seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .gen import CallSequence, RngStream, co_call_sequence, decode_pairs

__all__ = [
    "KnowledgeState",
    "GossipMilestones",
    "simulate_gossip",
    "co_milestones",
    "any_milestones",
]

_ANY_CHUNK = 65536  # fixed streaming batch; part of the determinism contract


@dataclass
class GossipMilestones:
    """Call indices of the milestone events; None when never reached."""

    n: int
    pair_exchange: Optional[int]
    first_expert: Optional[int]
    fixed_expert: Optional[int]
    all_experts: Optional[int]
    pair_exchange_oneway: Optional[int]
    calls_simulated: int

    @property
    def complete(self) -> bool:
        return None not in (self.pair_exchange, self.first_expert,
                            self.fixed_expert, self.all_experts)


class KnowledgeState:
    """Per-agent secret bitsets; call replay mutates it in place."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least 1 agent")
        self.n = n
        self.words = np.zeros((n, (n + 63) // 64), dtype=np.uint64)
        idx = np.arange(n)
        self.words[idx, idx // 64] = np.uint64(1) << (idx % 64).astype(np.uint64)
        self.counts = np.ones(n, dtype=np.int64)

    def knows(self, agent: int, secret: int) -> bool:
        w, r = divmod(secret, 64)
        return bool((self.words[agent, w] >> np.uint64(r)) & np.uint64(1))

    def secrets(self, agent: int) -> set:
        return {s for s in range(self.n) if self.knows(agent, s)}

    def is_expert(self, agent: int) -> bool:
        return int(self.counts[agent]) == self.n

    @property
    def num_experts(self) -> int:
        return int((self.counts == self.n).sum())

    def exchange(self, a: int, b: int) -> None:
        merged = self.words[a] | self.words[b]
        self.words[a] = merged
        self.words[b] = merged
        cnt = int(np.bitwise_count(merged).sum())
        self.counts[a] = cnt
        self.counts[b] = cnt


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True, nogil=True)
def _replay(cu, cv, words, counts, n, state, miles, start_index):
    # state: [n_experts]; miles: [pair_both, first, fixed, all, oneway],
    # -1 = not yet reached.  Returns the number of calls consumed from this
    # batch (replay stops early once every milestone is set).
    nwords = words.shape[1]
    w1 = np.int64(1 // 64)
    b1 = np.uint64(1 % 64)
    w0 = np.int64(0)
    b0 = np.uint64(0)
    for k in range(cu.size):
        a = cu[k]
        b = cv[k]
        idx = start_index + k + 1
        if counts[a] < n or counts[b] < n:
            cnt = 0
            for i in range(nwords):
                m = words[a, i] | words[b, i]
                words[a, i] = m
                words[b, i] = m
                cnt += _popcount(m)
            was_a = counts[a] == n
            was_b = counts[b] == n
            counts[a] = cnt
            counts[b] = cnt
            if cnt == n:
                if not was_a:
                    state[0] += 1
                if not was_b:
                    state[0] += 1
                if miles[1] < 0:
                    miles[1] = idx
                if miles[2] < 0 and (a == 0 or b == 0):
                    miles[2] = idx
                if miles[3] < 0 and state[0] == n:
                    miles[3] = idx
            if a <= 1 or b <= 1:
                if miles[4] < 0 and \
                        (words[1, w0] >> b0) & np.uint64(1) != np.uint64(0):
                    miles[4] = idx
                if miles[0] < 0 and \
                        (words[1, w0] >> b0) & np.uint64(1) != np.uint64(0) and \
                        (words[0, w1] >> b1) & np.uint64(1) != np.uint64(0):
                    miles[0] = idx
        if miles[0] >= 0 and miles[1] >= 0 and miles[2] >= 0 \
                and miles[3] >= 0 and miles[4] >= 0:
            return k + 1
    return cu.size


def _fresh_state(n: int):
    state = KnowledgeState(n)
    miles = np.full(5, -1, dtype=np.int64)
    experts = np.zeros(1, dtype=np.int64)
    experts[0] = state.num_experts  # n == 1 starts fully informed
    return state, miles, experts


def _milestones_result(n, miles, consumed) -> GossipMilestones:
    def opt(i):
        return int(miles[i]) if miles[i] >= 0 else None

    return GossipMilestones(n=n, pair_exchange=opt(0), first_expert=opt(1),
                            fixed_expert=opt(2), all_experts=opt(3),
                            pair_exchange_oneway=opt(4),
                            calls_simulated=int(consumed))


def simulate_gossip(calls: CallSequence) -> GossipMilestones:
    """Replay a call sequence, recording when each milestone first holds."""
    if calls.n < 2:
        raise ValueError("need at least 2 agents")
    state, miles, experts = _fresh_state(calls.n)
    consumed = _replay(calls.calls_u, calls.calls_v, state.words,
                       state.counts, calls.n, experts, miles, 0)
    return _milestones_result(calls.n, miles, consumed)


def co_milestones(n: int, rng: RngStream) -> GossipMilestones:
    """Milestones under the call-once schedule (all pairs, random order).

    The schedule exhausts every pair exactly once, which always informs
    everyone, so all milestones are present.
    """
    return simulate_gossip(co_call_sequence(n, rng))


def any_milestones(n: int, rng: RngStream,
                   call_cap: Optional[int] = None) -> GossipMilestones:
    """Milestones under i.i.d. uniform random calls (with repetition).

    Calls are generated lazily in fixed-size batches and never
    materialised as a whole; the run stops once all milestones are found
    or after ``call_cap`` calls (default ``ceil(10 n ln n)``), leaving
    unreached milestones absent.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    if call_cap is None:
        call_cap = int(math.ceil(10.0 * n * math.log(n)))
    if call_cap < 1:
        raise ValueError("call_cap must be >= 1")
    gen = rng.generator()
    npairs = n * (n - 1) // 2
    state, miles, experts = _fresh_state(n)
    done = 0
    while done < call_cap:
        chunk = min(_ANY_CHUNK, call_cap - done)
        idx = gen.integers(0, npairs, size=chunk)
        cu, cv = decode_pairs(idx, n)
        consumed = _replay(cu, cv, state.words, state.counts, n,
                           experts, miles, done)
        done += consumed
        if consumed < chunk:
            break
    return _milestones_result(n, miles, done)
