"""Per-state action search: which prefix-free string set U(s), which codeword lengths.

For a fixed rate guess ``R`` and cost vector ``c`` the one-step objective of a
branch set is ``sum_i p_i (l_i - R m_i + c(dest_i))`` with ``p_i = 2**-l_i``.
Writing ``x_i = c(dest_i) - R m_i`` this is ``sum_i p_i (x_i - log2 p_i)``,
i.e. ``-D(p || 2**x)``, which GHC maximizes for a fixed candidate set.

Two action families are supported:

``block``
    every codeword is a string of exactly ``d`` symbols.  Any subset of
    equal-length strings is prefix-free, so a single GHC call over all
    depth-``d`` continuations is an exact search.
``prefix``
    any prefix-free set of strings of length 1..d.  Since GHC may drop
    items, only maximal antichains ("cuts") of the continuation tree need
    scoring.  They are enumerated exactly while their number stays under
    ``cut_cap``; beyond that a restricted candidate set is scored instead
    (see :class:`CutSearch`).
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping, Sequence

import numpy as np

from ..graph import ContinuationTree, State
from .ghc import ghc_log, ghc_score, ghc_scores
from ..markov import Branch
from .policy import Action

FAMILIES = ("block", "prefix")
DEFAULT_CUT_CAP = 100_000

Cut = tuple[int, ...]


def _node_depth(tree: ContinuationTree, node: int) -> int:
    return tree.nodes[node].length


def count_cuts(tree: ContinuationTree, max_depth: int | None = None) -> int:
    """Number of maximal antichains of the tree truncated at ``max_depth``."""
    limit = tree.depth if max_depth is None else max_depth

    def g(v: int) -> int:
        ch = tree.nodes[v].children
        if not ch or tree.nodes[v].length >= limit:
            return 1
        return 1 + math.prod(g(c) for c in ch)

    return math.prod(g(r) for r in tree.roots)


def iter_cuts(tree: ContinuationTree, max_depth: int | None = None) -> Iterator[Cut]:
    """Maximal antichains of the truncated tree; shallow choices come first."""
    limit = tree.depth if max_depth is None else max_depth

    def below(v: int) -> list[Cut]:
        ch = tree.nodes[v].children
        if not ch or tree.nodes[v].length >= limit:
            return [(v,)]
        return [(v,)] + combine(ch)

    def combine(nodes: Sequence[int]) -> list[Cut]:
        acc: list[Cut] = [()]
        for v in nodes:
            acc = [a + b for a in acc for b in below(v)]
        return acc

    yield from combine(tree.roots)


def level_cut(tree: ContinuationTree, depth: int) -> Cut:
    """All nodes at exactly ``depth`` (every branch of an ISI tree reaches full depth)."""
    return tuple(i for i, n in enumerate(tree.nodes) if n.length == depth)


def merge_cut(tree: ContinuationTree, xs: Sequence[float], max_depth: int) -> Cut:
    """Bottom-up merge rule: keep a node if its own log-weight beats the
    GHC-merged effective weight of its children, else descend."""

    def eff(v: int) -> tuple[float, Cut]:
        ch = tree.nodes[v].children
        if not ch or tree.nodes[v].length >= max_depth:
            return xs[v], (v,)
        parts = [eff(c) for c in ch]
        merged = ghc_score([p[0] for p in parts])
        if xs[v] >= merged:
            return xs[v], (v,)
        return merged, tuple(i for p in parts for i in p[1])

    return tuple(i for r in tree.roots for i in eff(r)[1])


class CutSearch:
    """Precompiled per-state search over candidate branch sets.

    ``dest_index`` maps each tree node to the integer index of its destination
    state so the search can run on a plain cost array.

    In the ``prefix`` family with more than ``cut_cap`` cuts the candidates are
    every cut of the tree truncated at the deepest depth ``d0`` that still fits
    the cap, plus, for each depth ``t`` in ``d0+1..d``, the full depth-``t``
    level and the merge-rule cut of the depth-``t`` truncation.  This set
    contains the exact candidate set of every smaller depth and the whole
    ``block`` family, so results never decrease with ``d``.
    """

    def __init__(
        self,
        tree: ContinuationTree,
        dest_index: Sequence[int],
        family: str = "block",
        cut_cap: int = DEFAULT_CUT_CAP,
    ) -> None:
        if family not in FAMILIES:
            raise ValueError(f"unknown action family {family!r}; expected one of {FAMILIES}")
        self.tree = tree
        self.family = family
        self.dest = np.asarray(dest_index, dtype=np.intp)
        self.m = np.array([n.length for n in tree.nodes], dtype=float)
        self.merge_depths: tuple[int, ...] = ()
        d = tree.depth
        if family == "block":
            self.cuts: list[Cut] = [level_cut(tree, d)]
            self.exact = True
            return
        n_cuts = count_cuts(tree)
        if n_cuts <= cut_cap:
            self.cuts = list(iter_cuts(tree))
            self.exact = True
            return
        d0 = max(t for t in range(1, d) if count_cuts(tree, t) <= cut_cap) if d > 1 else 1
        cuts = list(iter_cuts(tree, d0))
        seen = set(cuts)
        for t in range(d0 + 1, d + 1):
            lvl = level_cut(tree, t)
            if lvl not in seen:
                cuts.append(lvl)
                seen.add(lvl)
        self.cuts = cuts
        self.merge_depths = tuple(range(d0 + 1, d + 1))
        self.exact = False

    def _compile(self) -> None:
        width = max(len(c) for c in self.cuts)
        # padding points at a sentinel slot holding +inf
        pad = len(self.tree.nodes)
        self._matrix = np.full((len(self.cuts), width), pad, dtype=np.intp)
        for j, cut in enumerate(self.cuts):
            self._matrix[j, : len(cut)] = cut

    def log_weights(self, R: float, cost: np.ndarray) -> np.ndarray:
        return cost[self.dest] - R * self.m

    def best(self, R: float, cost: np.ndarray) -> tuple[float, Cut, list[int | None]]:
        """Maximal one-step value with its cut and codeword lengths (``None`` = unused)."""
        xs = self.log_weights(R, cost)
        if len(self.cuts) == 1 and not self.merge_depths:
            cut = self.cuts[0]
            score, lengths = ghc_log(xs[list(cut)].tolist())
            return score, cut, lengths
        if not hasattr(self, "_matrix"):
            self._compile()
        ext = np.append(xs, np.inf)
        scores = ghc_scores(ext[self._matrix]).tolist()
        cands = list(self.cuts)
        if self.merge_depths:
            xl = xs.tolist()
            for t in self.merge_depths:
                cut = merge_cut(self.tree, xl, t)
                cands.append(cut)
                scores.append(ghc_score([xl[i] for i in cut]))
        top = max(scores)
        eps = 1e-12 * max(1.0, abs(top))
        tied = [j for j, s in enumerate(scores) if s >= top - eps]
        best_key = None
        chosen = None
        for j in tied:
            cut = cands[j]
            score, lengths = ghc_log(xs[list(cut)].tolist())
            kept = [i for i, l in zip(cut, lengths) if l is not None]
            # fewer codewords, then fewer symbols, then canonical order
            key = (len(kept), sum(self.tree.nodes[i].length for i in kept), j)
            if best_key is None or key < best_key:
                best_key, chosen = key, (score, cut, lengths)
        return chosen

    def action(self, cut: Cut, lengths: Sequence[int | None]) -> Action:
        nodes = self.tree.nodes
        branches = sorted(
            (
                Branch(nodes[i].symbols, l, nodes[i].dest)
                for i, l in zip(cut, lengths)
                if l is not None
            ),
            key=lambda b: b.symbols,
        )
        return Action(tuple(branches))


def optimize_state(
    tree: ContinuationTree,
    R: float,
    cost: Mapping[State, float],
    family: str = "block",
    cut_cap: int = DEFAULT_CUT_CAP,
) -> tuple[Action, float]:
    """Best action at ``tree.root`` for rate guess ``R`` and state costs ``cost``."""
    states = list(cost)
    index = {s: i for i, s in enumerate(states)}
    search = CutSearch(tree, [index[n.dest] for n in tree.nodes], family, cut_cap)
    value, cut, lengths = search.best(R, np.array([cost[s] for s in states], dtype=float))
    return search.action(cut, lengths), value
