import random

import pytest

from isifree.codec import CodeEntry, ModulationCode, canonical_bit_strings
from isifree.graph import (
    ChannelSpec,
    build_constraint_graph,
    build_continuation_tree,
    format_state,
    parse_state,
    parse_symbols,
)


def _literal_code(spec, depth, rows):
    table = {}
    for state, entries in rows.items():
        out = []
        for symbols, bits in entries:
            syms = parse_symbols(symbols)
            full = parse_state(state) + syms
            out.append(CodeEntry(bits, syms, format_state(full[-spec.k:])))
        table[state] = tuple(out)
    return ModulationCode(spec, depth, "-", table)


@pytest.fixture
def depth2_code():
    """A reference depth-2 code for k=1, N=2 at rate 1.25, entered literally."""
    return _literal_code(
        ChannelSpec(1, 2),
        2,
        {
            "-": [
                ("- -", "000"), ("M1 -", "001"), ("M2 -", "01"), ("- M1", "100"),
                ("- M2", "101"), ("M1 M2", "110"), ("M2 M1", "111"),
            ],
            "M1": [("- -", "00"), ("M2 -", "01"), ("- M1", "100"), ("- M2", "101"), ("M2 M1", "11")],
            "M2": [("- -", "00"), ("M1 -", "01"), ("- M1", "100"), ("- M2", "101"), ("M1 M2", "11")],
        },
    )


@pytest.fixture
def mmcsk_code():
    """Modified MCSK: a depth-1 code for k=1, N=2 at rate 1.25."""
    return _literal_code(
        ChannelSpec(1, 2),
        1,
        {
            "-": [("-", "0"), ("M1", "10"), ("M2", "11")],
            "M1": [("-", "0"), ("M2", "1")],
            "M2": [("-", "0"), ("M1", "1")],
        },
    )


_TREES: dict = {}


def random_code(spec: ChannelSpec, depth: int, rng: random.Random) -> ModulationCode:
    """A random valid code: a random cut of each continuation tree, a random
    subset of it, and a random full binary code over that subset."""
    graph = build_constraint_graph(spec)
    table = {}
    for state in graph.states:
        key = (spec, depth, state)
        if key not in _TREES:
            _TREES[key] = build_continuation_tree(state, depth, spec)
        tree = _TREES[key]
        stop = rng.random()

        def pick(nodes):
            out = []
            for v in nodes:
                node = tree.nodes[v]
                if not node.children or rng.random() < stop:
                    out.append(v)
                else:
                    out.extend(pick(node.children))
            return out

        cut = pick(tree.roots)
        chosen = rng.sample(cut, rng.randint(min(2, len(cut)), len(cut)))
        lengths = [0]
        while len(lengths) < len(chosen):
            j = rng.randrange(len(lengths))
            l = lengths.pop(j)
            lengths += [l + 1, l + 1]
        lengths.sort()
        rng.shuffle(chosen)
        bits = canonical_bit_strings(lengths)
        entries = []
        for v, b in zip(chosen, bits):
            node = tree.nodes[v]
            entries.append(CodeEntry(b, node.symbols, format_state(node.dest)))
        table[format_state(state)] = tuple(entries)
    return ModulationCode(spec, depth, format_state(spec.start_state), table)


SMALL_SPECS = [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 4)]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
