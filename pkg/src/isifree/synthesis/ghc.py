"""Geometric Huffman Coding.

Finds the dyadic pmf ``p(i) = 2**-l_i`` (over a subset of items, Kraft sum
exactly one) minimizing ``D(p || q)`` for a positive, not necessarily
normalized, weight vector ``q``.  The two smallest weights ``a >= b`` are
repeatedly combined: if ``a >= 4 b`` the smaller item is dropped and ``a``
survives, otherwise both become siblings under a node of weight
``2 sqrt(a b)``.  The final root weight ``W`` gives the optimum,
``-D(p || q) = log2 W``.

Internally everything runs on log2-weights, where the merge is
``1 + (x_a + x_b) / 2`` and the drop test is ``x_a >= x_b + 2``.
"""

from __future__ import annotations

import heapq
import math
from typing import Sequence

import numpy as np

# an exact a == 4b tie favours dropping (fewer codewords, same score)
_TIE_EPS = 1e-12


def ghc_log(xs: Sequence[float]) -> tuple[float, list[int | None]]:
    """GHC on log2-weights; returns ``(score, lengths)`` with ``None`` for dropped items."""
    n = len(xs)
    if n == 0:
        raise ValueError("GHC needs at least one item")
    lengths: list[int | None] = [None] * n
    # heap entries: (log-weight, tiebreak, member item indices)
    heap = [(float(x), i, [i]) for i, x in enumerate(xs)]
    heapq.heapify(heap)
    depth = [0] * n
    counter = n
    while len(heap) > 1:
        xb, _, mb = heapq.heappop(heap)
        xa, ta, ma = heapq.heappop(heap)
        if xa >= xb + 2.0 - _TIE_EPS:
            heapq.heappush(heap, (xa, ta, ma))
            continue
        for i in ma:
            depth[i] += 1
        for i in mb:
            depth[i] += 1
        heapq.heappush(heap, (1.0 + 0.5 * (xa + xb), counter, ma + mb))
        counter += 1
    score, _, members = heap[0]
    for i in members:
        lengths[i] = depth[i]
    return score, lengths


def ghc_score(xs: Sequence[float]) -> float:
    """Score-only GHC on log2-weights (no length bookkeeping)."""
    heap = [float(x) for x in xs]
    if not heap:
        raise ValueError("GHC needs at least one item")
    heapq.heapify(heap)
    pop, push = heapq.heappop, heapq.heappush
    while len(heap) > 1:
        xb = pop(heap)
        xa = pop(heap)
        push(heap, xa if xa >= xb + 2.0 - _TIE_EPS else 1.0 + 0.5 * (xa + xb))
    return heap[0]


def ghc(q: Sequence[float]) -> tuple[list[int | None], float]:
    """Optimal dyadic approximation of positive weights ``q``.

    Returns ``(lengths, score)`` where dropped items have length ``None`` and
    ``score = sum_i p_i log2(q_i / p_i) = -D(p || q)``.

    >>> ghc([8, 1])
    ([0, None], 3.0)
    """
    if len(q) == 0:
        raise ValueError("GHC needs at least one weight")
    if any(not (w > 0) or math.isinf(w) for w in q):
        raise ValueError("GHC weights must be positive and finite")
    score, lengths = ghc_log([math.log2(w) for w in q])
    return lengths, score


def dyadic_score(q: Sequence[float], lengths: Sequence[int | None]) -> float:
    """``-D(p || q)`` for the dyadic pmf given by ``lengths`` (``None`` = unused)."""
    return sum(
        2.0**-l * (math.log2(w) + l) for w, l in zip(q, lengths) if l is not None
    )


def ghc_scores(X: np.ndarray) -> np.ndarray:
    """Row-wise :func:`ghc_score` for a (B, n) array of log2-weights.

    Rows may be padded with ``+inf``; padding never takes part.  Every row
    needs at least one finite entry.  Merged values come out in nondecreasing
    order, so the classic two-queue Huffman scheme runs in linear time.
    """
    leaves = np.sort(np.asarray(X, dtype=float), axis=1)
    rows, width = leaves.shape
    if width == 1:
        return leaves[:, 0].copy()
    leaves = np.concatenate([leaves, np.full((rows, 1), np.inf)], axis=1)
    queue = np.full((rows, width), np.inf)
    r = np.arange(rows)
    li = np.zeros(rows, dtype=np.intp)
    qh = np.zeros(rows, dtype=np.intp)

    def pop() -> np.ndarray:
        lv = leaves[r, li]
        qv = queue[r, qh]
        take_leaf = lv <= qv
        li[:] += take_leaf
        qh[:] += ~take_leaf
        return np.where(take_leaf, lv, qv)

    merged = leaves[:, 0]
    for t in range(width - 1):
        xb = pop()
        xa = pop()
        merged = np.where(xa >= xb + 2.0 - _TIE_EPS, xa, 1.0 + 0.5 * (xa + xb))
        merged = np.where(np.isinf(xa), xb, merged)
        queue[:, t] = merged
    return merged
