"""Exhaustive policy search, used as an independent check on the DP.

Shares nothing with the DP path except the channel definition and the
chain evaluation used on the final winner.  Continuations come from direct
enumeration of symbol strings filtered by the ISI predicate, prefix-freeness
is checked on the strings themselves, codeword lengths are enumerated
outright (no GHC), and every joint policy is scored by its stationary law.

Two reductions keep the product of per-state action lists small; both are
exact for the max-rate objective:

* the stationary law depends on an action only through its transition row,
  so actions are grouped by ``(row, E[symbols])`` keeping the largest
  ``E[bits]``;
* with the row fixed, the rate is a linear-fractional function of
  ``(E[symbols], E[bits])`` whose pole lies left of every candidate, so only
  points on the upper-left convex hull can be optimal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..capacity import channel_capacity
from ..codec import code_from_policy
from ..errors import EnumerationLimitError
from ..graph import ChannelSpec, State, enumerate_states, is_isi_free
from ..markov import Branch, analytic_rate, stationary_distribution
from .dp import SynthesisResult
from .policy import Action, Policy
from .search import FAMILIES

DEFAULT_MAX_BITS = 8
DEFAULT_POLICY_CAP = 10**6
_BATCH = 50_000


@dataclass
class _ActionSet:
    rows: np.ndarray  # (A, S) transition probabilities
    bits: np.ndarray  # (A,) expected bits
    symbols: np.ndarray  # (A,) expected symbols
    actions: list[Action]


def continuations(state: State, d: int, spec: ChannelSpec, family: str) -> list[tuple[int, ...]]:
    lengths = [d] if family == "block" else range(1, d + 1)
    out = []
    for t in lengths:
        for tail in itertools.product(spec.symbols, repeat=t):
            if is_isi_free(state + tail, spec.k):
                out.append(tail)
    return out


def _is_prefix(a: tuple, b: tuple) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def _state_actions(
    state: State, d: int, spec: ChannelSpec, family: str, index: dict[State, int], max_bits: int
) -> _ActionSet:
    strings = continuations(state, d, spec, family)
    k = spec.k
    unit = 1 << max_bits
    n_states = len(index)
    dests = [index[(state + s)[-k:]] for s in strings]
    best: dict[tuple, tuple[int, tuple]] = {}

    def visit(j: int, budget: int, chosen: list, row: list, em: int, el: int) -> None:
        if budget == 0:
            key = (tuple(row), em)
            if key not in best or best[key][0] < el:
                best[key] = (el, tuple(chosen))
            return
        if j == len(strings):
            return
        visit(j + 1, budget, chosen, row, em, el)
        s = strings[j]
        if any(_is_prefix(strings[c], s) or _is_prefix(s, strings[c]) for c, _ in chosen):
            return
        m, dst = len(s), dests[j]
        for length in range(max_bits + 1):
            w = unit >> length
            if w > budget:
                continue
            row[dst] += w
            chosen.append((j, length))
            visit(j + 1, budget - w, chosen, row, em + w * m, el + w * length)
            chosen.pop()
            row[dst] -= w

    visit(0, unit, [], [0] * n_states, 0, 0)

    by_row: dict[tuple, list[tuple[int, int, tuple]]] = {}
    for (row, em), (el, chosen) in best.items():
        by_row.setdefault(row, []).append((em, el, chosen))
    rows, bits, syms, actions = [], [], [], []
    for row, pts in by_row.items():
        for em, el, chosen in _upper_left_hull(pts):
            rows.append(np.array(row, dtype=float) / unit)
            bits.append(el / unit)
            syms.append(em / unit)
            branches = sorted(
                (Branch(strings[j], l, (state + strings[j])[-k:]) for j, l in chosen),
                key=lambda b: b.symbols,
            )
            actions.append(Action(tuple(branches)))
    return _ActionSet(np.array(rows), np.array(bits), np.array(syms), actions)


def _upper_left_hull(pts: list[tuple[int, int, tuple]]) -> list[tuple[int, int, tuple]]:
    """Points (x=E[symbols], y=E[bits]) on the upper hull with y increasing in x."""
    pts = sorted(pts, key=lambda p: (p[0], -p[1]))
    # Pareto: strictly increasing y as x grows
    front = []
    for p in pts:
        if not front or p[1] > front[-1][1]:
            front.append(p)
    hull: list = []
    for p in front:
        while len(hull) >= 2:
            (x1, y1, _), (x2, y2, _) = hull[-2], hull[-1]
            # drop the middle point if it lies on or below the chord
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _batch_rates(P: np.ndarray, el: np.ndarray, em: np.ndarray, start: int) -> np.ndarray:
    """Long-run rate from ``start`` for a batch of chains (B, S, S)."""
    n = P.shape[-1]
    Q = 0.5 * (P + np.eye(n))  # lazy chain: same stationary laws, aperiodic
    for _ in range(64):
        Q = Q @ Q
    pi = Q[:, start, :]
    return (pi * el).sum(axis=1) / (pi * em).sum(axis=1)


def brute_force_synthesize(
    spec: ChannelSpec,
    d: int,
    family: str = "block",
    max_bits: int = DEFAULT_MAX_BITS,
    policy_cap: int = DEFAULT_POLICY_CAP,
) -> SynthesisResult:
    if family not in FAMILIES:
        raise ValueError(f"unknown action family {family!r}")
    states = enumerate_states(spec)
    index = {s: i for i, s in enumerate(states)}
    sets = [_state_actions(s, d, spec, family, index, max_bits) for s in states]
    total = math.prod(len(a.actions) for a in sets)
    if total > policy_cap:
        raise EnumerationLimitError(
            f"{total} candidate policies exceed the cap of {policy_cap}"
        )
    start = index[spec.start_state]
    sizes = [len(a.actions) for a in sets]
    best_rate, best_idx = -math.inf, None
    flat = np.arange(total)
    for lo in range(0, total, _BATCH):
        idx = np.stack(np.unravel_index(flat[lo : lo + _BATCH], sizes), axis=1)
        P = np.stack([sets[s].rows[idx[:, s]] for s in range(len(states))], axis=1)
        el = np.stack([sets[s].bits[idx[:, s]] for s in range(len(states))], axis=1)
        em = np.stack([sets[s].symbols[idx[:, s]] for s in range(len(states))], axis=1)
        rates = _batch_rates(P, el, em, start)
        j = int(np.argmax(rates))
        if rates[j] > best_rate:
            best_rate, best_idx = float(rates[j]), idx[j]
    policy = Policy(spec, d, {s: sets[i].actions[best_idx[i]] for i, s in enumerate(states)})
    pi = stationary_distribution(policy)
    rate = analytic_rate(policy, pi)
    cap = channel_capacity(spec).capacity_bits_per_symbol
    return SynthesisResult(
        spec=spec,
        depth=d,
        family=family,
        rate=rate,
        root=best_rate,
        policy=policy,
        stationary=pi,
        capacity_bound=cap,
        code=code_from_policy(policy, {"rate": rate, "family": family, "oracle": "brute-force"}),
        exact=True,
        bisection_steps=0,
    )
