"""Stationary behaviour of the Markov chain a code induces on its states.

Both synthesized policies and modulation codes expose a transition table:
state -> branches, each branch a symbol string sent with probability
``2**-bits`` (uniform i.i.d. input bits) that lands in ``next``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import StationaryError


@dataclass(frozen=True)
class Branch:
    """One codeword: a symbol string sent with probability 2**-bits, landing in ``next``."""

    symbols: tuple[int, ...]
    bits: int
    next: Hashable

    @property
    def prob(self) -> float:
        return 2.0**-self.bits

    @property
    def m(self) -> int:
        return len(self.symbols)


def _table(obj) -> tuple[Mapping[Hashable, Sequence[Branch]], Hashable]:
    return obj.transition_table(), obj.start


def transition_matrix(table: Mapping[Hashable, Sequence[Branch]]):
    keys = list(table)
    index = {s: i for i, s in enumerate(keys)}
    P = np.zeros((len(keys), len(keys)))
    for s, branches in table.items():
        for b in branches:
            if b.next not in index:
                raise StationaryError(f"branch from {s!r} leads to unknown state {b.next!r}")
            P[index[s], index[b.next]] += b.prob
    return keys, P


def stationary_distribution(policy, tol: float = 1e-12) -> dict[Hashable, float]:
    """Stationary law of the policy-induced chain, as seen from the start state.

    Works on anything exposing ``transition_table()`` and ``start`` (a
    :class:`~isifree.synthesis.Policy` or a
    :class:`~isifree.codec.ModulationCode`).  States not on the recurrent
    class reachable from the start get probability zero; more than one
    reachable closed class is an error.
    """
    table, start = _table(policy)
    keys, P = transition_matrix(table)
    n = len(keys)
    s0 = keys.index(start)

    adj = csr_matrix(P > 0)
    _, labels = connected_components(adj, directed=True, connection="strong")
    reach = np.zeros(n, bool)
    reach[s0] = True
    frontier = [s0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in np.flatnonzero(P[i]):
                if not reach[j]:
                    reach[j] = True
                    nxt.append(j)
        frontier = nxt
    closed = []
    for lab in np.unique(labels[reach]):
        members = np.flatnonzero(labels == lab)
        leaves = P[np.ix_(members, np.setdiff1d(np.arange(n), members))].sum() > 0
        if not leaves:
            closed.append(members)
    if len(closed) != 1:
        raise StationaryError(
            f"{len(closed)} closed classes reachable from the start state; no unique stationary law"
        )
    cls = closed[0]
    sub = P[np.ix_(cls, cls)]
    m = len(cls)
    A = sub.T - np.eye(m)
    A[-1, :] = 1.0
    rhs = np.zeros(m)
    rhs[-1] = 1.0
    try:
        pi_cls = np.linalg.solve(A, rhs)
        if not np.allclose(pi_cls @ sub, pi_cls, atol=1e-9):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        pi_cls = _iterate(sub, tol)
    pi = np.zeros(n)
    pi[cls] = pi_cls
    return {s: float(pi[i]) for i, s in enumerate(keys)}


def _iterate(P: np.ndarray, tol: float, max_iter: int = 1_000_000) -> np.ndarray:
    lazy = 0.5 * (P + np.eye(len(P)))
    pi = np.full(len(P), 1.0 / len(P))
    for _ in range(max_iter):
        nxt = pi @ lazy
        if np.abs(nxt - pi).max() < tol:
            return nxt / nxt.sum()
        pi = nxt
    raise StationaryError("stationary iteration did not converge")


def analytic_rate(policy, pi: Mapping[Hashable, float] | None = None) -> float:
    """Long-run bits per symbol: sum pi(s) E_s[bits] / sum pi(s) E_s[symbols]."""
    table, _ = _table(policy)
    if pi is None:
        pi = stationary_distribution(policy)
    num = den = 0.0
    for s, branches in table.items():
        w = pi.get(s, 0.0)
        if w == 0.0:
            continue
        num += w * sum(b.prob * b.bits for b in branches)
        den += w * sum(b.prob * b.m for b in branches)
    return num / den


def state_rates(policy) -> dict[Hashable, float]:
    table, _ = _table(policy)
    out = {}
    for s, branches in table.items():
        el = sum(b.prob * b.bits for b in branches)
        em = sum(b.prob * b.m for b in branches)
        out[s] = el / em
    return out
