"""Symbols, states and ISI-free constraint graphs.

A symbol is a plain ``int``: ``0`` is the gap (no release) and ``i >= 1`` is
molecule type ``M_i``.  A state is a tuple of the last ``k`` symbols, most
recent last.  Canonical ordering everywhere is the natural integer order,
so the gap sorts before every molecule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import StateSpaceError

GAP = 0
DEFAULT_STATE_LIMIT = 10**6

Symbol = int
State = tuple[int, ...]


@dataclass(frozen=True)
class ChannelSpec:
    """Channel memory ``k`` (slots) and number of molecule types."""

    k: int
    num_types: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"channel memory k must be >= 1, got {self.k}")
        if self.num_types < 1:
            raise ValueError(f"number of molecule types must be >= 1, got {self.num_types}")

    @property
    def symbols(self) -> range:
        return range(self.num_types + 1)

    @property
    def start_state(self) -> State:
        return (GAP,) * self.k

    def count_states(self) -> int:
        # choose j molecule positions, fill them with distinct molecules
        k, n = self.k, self.num_types
        return sum(math.comb(k, j) * math.perm(n, j) for j in range(min(k, n) + 1))


# -- text forms ---------------------------------------------------------------

def format_symbol(sym: Symbol) -> str:
    return "-" if sym == GAP else f"M{sym}"


def parse_symbol(text: str) -> Symbol:
    text = text.strip()
    if text == "-":
        return GAP
    if len(text) > 1 and text[0] in "Mm" and text[1:].isdigit():
        value = int(text[1:])
        if value >= 1:
            return value
    raise ValueError(f"not a symbol: {text!r}")


def format_symbols(seq: Iterable[Symbol]) -> str:
    return " ".join(format_symbol(s) for s in seq)


def parse_symbols(text: str) -> tuple[Symbol, ...]:
    return tuple(parse_symbol(tok) for tok in text.split())


def format_state(state: State) -> str:
    return ",".join(format_symbol(s) for s in state)


def parse_state(text: str) -> State:
    return tuple(parse_symbol(tok) for tok in text.split(","))


# -- predicates ---------------------------------------------------------------

def is_isi_free(seq: Sequence[Symbol], k: int) -> bool:
    """True iff no molecule repeats inside any k+1 consecutive symbols."""
    if k < 1:
        raise ValueError("k must be >= 1")
    last_seen: dict[int, int] = {}
    for pos, sym in enumerate(seq):
        if sym == GAP:
            continue
        prev = last_seen.get(sym)
        if prev is not None and pos - prev <= k:
            return False
        last_seen[sym] = pos
    return True


def is_valid_state(state: Sequence[Symbol], spec: ChannelSpec) -> bool:
    if len(state) != spec.k:
        return False
    if any(s < 0 or s > spec.num_types for s in state):
        return False
    molecules = [s for s in state if s != GAP]
    return len(molecules) == len(set(molecules))


def allowed_next(state: State, spec: ChannelSpec) -> list[Symbol]:
    """Symbols that may follow ``state``: the gap, or any molecule absent from the window."""
    return [a for a in spec.symbols if a == GAP or a not in state]


def enumerate_states(spec: ChannelSpec, limit: int = DEFAULT_STATE_LIMIT) -> list[State]:
    """All valid k-windows in lexicographic order (gap < M1 < M2 < ...)."""
    total = spec.count_states()
    if total > limit:
        raise StateSpaceError(
            f"k={spec.k}, N={spec.num_types} has {total} states, above the limit of {limit}"
        )
    out: list[State] = []

    def extend(prefix: tuple[int, ...]) -> None:
        if len(prefix) == spec.k:
            out.append(prefix)
            return
        for a in spec.symbols:
            if a == GAP or a not in prefix:
                extend(prefix + (a,))

    extend(())
    return out


# -- single-step graph --------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    source: State
    target: State
    label: Symbol


@dataclass(frozen=True)
class ConstraintGraph:
    spec: ChannelSpec
    states: tuple[State, ...]
    edges: tuple[Edge, ...]
    index: dict[State, int] = field(compare=False, repr=False)

    def successors(self, state: State) -> list[tuple[Symbol, State]]:
        return [(a, state[1:] + (a,)) for a in allowed_next(state, self.spec)]

    def __len__(self) -> int:
        return len(self.states)


def build_constraint_graph(spec: ChannelSpec, limit: int = DEFAULT_STATE_LIMIT) -> ConstraintGraph:
    states = enumerate_states(spec, limit)
    edges = [
        Edge(u, u[1:] + (a,), a)
        for u in states
        for a in allowed_next(u, spec)
    ]
    return ConstraintGraph(
        spec=spec,
        states=tuple(states),
        edges=tuple(edges),
        index={s: i for i, s in enumerate(states)},
    )


# -- depth-d continuations ----------------------------------------------------

@dataclass(frozen=True)
class TreeNode:
    symbols: tuple[Symbol, ...]
    parent: int  # -1 for children of the root
    dest: State
    children: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class ContinuationTree:
    """Every ISI-free continuation of ``root`` with 1..depth symbols, as a prefix tree.

    ``nodes`` are in preorder with children sorted canonically, which is also
    lexicographic order of the symbol strings.  ``roots`` lists the
    depth-1 nodes.
    """

    root: State
    depth: int
    nodes: tuple[TreeNode, ...]
    roots: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def children_of(self, node: int) -> tuple[int, ...]:
        return self.roots if node < 0 else self.nodes[node].children

    def labels(self) -> list[tuple[Symbol, ...]]:
        return [n.symbols for n in self.nodes]


def build_continuation_tree(state: State, d: int, spec: ChannelSpec) -> ContinuationTree:
    if d < 1:
        raise ValueError(f"depth d must be >= 1, got {d}")
    if not is_valid_state(state, spec):
        raise ValueError(f"invalid state {state!r} for {spec}")
    symbols: list[tuple[int, ...]] = []
    parents: list[int] = []
    dests: list[State] = []
    children: list[list[int]] = []
    roots: list[int] = []

    def grow(window: State, path: tuple[int, ...], parent: int) -> None:
        if len(path) == d:
            return
        for a in allowed_next(window, spec):
            idx = len(symbols)
            nxt = window[1:] + (a,)
            symbols.append(path + (a,))
            parents.append(parent)
            dests.append(nxt)
            children.append([])
            (roots if parent < 0 else children[parent]).append(idx)
            grow(nxt, path + (a,), idx)

    grow(state, (), -1)
    nodes = tuple(
        TreeNode(symbols[i], parents[i], dests[i], tuple(children[i]))
        for i in range(len(symbols))
    )
    return ContinuationTree(root=state, depth=d, nodes=nodes, roots=tuple(roots))
