"""Modulation codes: file format, streaming encoder/decoder, validation, MCSK.

A code is a finite-state machine.  Each code state is named by its symbol
window in text form (``"M1,-"``), optionally followed by ``|tag`` when the
machine needs more memory than the window (MCSK tracks slot parity this
way).  At every state a full prefix-free set of bit strings is mapped onto
a prefix-free set of ISI-free symbol strings.

Code file (JSON)::

    {"spec": {"k": 1, "N": 2}, "depth": 1, "start": "-",
     "states": {"-": [{"bits": "0", "symbols": "-", "next": "-"}, ...], ...},
     "metadata": {"rate": 1.25}}

Encoded stream: a header line ``n_bits=<int>`` followed by the
space-separated symbols.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DesyncError, MalformedCodeError, UnsupportedSpecError
from .graph import (
    GAP,
    ChannelSpec,
    State,
    format_state,
    format_symbols,
    is_isi_free,
    is_valid_state,
    parse_state,
    parse_symbols,
)
from .markov import Branch


@dataclass(frozen=True)
class CodeEntry:
    bits: str
    symbols: tuple[int, ...]
    next: str


@dataclass(frozen=True)
class ModulationCode:
    spec: ChannelSpec
    depth: int
    start: str
    table: Mapping[str, tuple[CodeEntry, ...]]
    metadata: dict = field(default_factory=dict, compare=False)

    @staticmethod
    def window_of(name: str) -> State:
        return parse_state(name.split("|", 1)[0])

    def transition_table(self) -> dict[str, tuple[Branch, ...]]:
        return {
            s: tuple(Branch(e.symbols, len(e.bits), e.next) for e in entries)
            for s, entries in self.table.items()
        }

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "spec": {"k": self.spec.k, "N": self.spec.num_types},
            "depth": self.depth,
            "start": self.start,
            "states": {
                s: [
                    {"bits": e.bits, "symbols": format_symbols(e.symbols), "next": e.next}
                    for e in entries
                ]
                for s, entries in self.table.items()
            },
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModulationCode":
        try:
            spec = ChannelSpec(int(data["spec"]["k"]), int(data["spec"]["N"]))
            table = {
                str(s): tuple(
                    CodeEntry(str(e["bits"]), parse_symbols(e["symbols"]), str(e["next"]))
                    for e in entries
                )
                for s, entries in data["states"].items()
            }
            return cls(spec, int(data["depth"]), str(data["start"]), table, dict(data.get("metadata", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCodeError(f"bad code file: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ModulationCode":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise MalformedCodeError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)


# -- construction -------------------------------------------------------------

def canonical_bit_strings(lengths: Sequence[int]) -> list[str]:
    """Canonical prefix code for ``lengths`` (taken in the given order, which
    must be sorted by length)."""
    out = []
    code = 0
    prev = 0
    for i, l in enumerate(lengths):
        if i:
            code = (code + 1) << (l - prev)
        else:
            code <<= l
        out.append(format(code, f"0{l}b") if l else "")
        prev = l
    return out


def code_from_table(
    spec: ChannelSpec,
    depth: int,
    table: Mapping[State, Iterable[Branch]],
    metadata: dict | None = None,
) -> ModulationCode:
    """Assign canonical bit strings (shorter first, ties in symbol order)."""
    out = {}
    for state, branches in table.items():
        ordered = sorted(branches, key=lambda b: (b.bits, b.symbols))
        bit_strings = canonical_bit_strings([b.bits for b in ordered])
        out[format_state(state)] = tuple(
            CodeEntry(bs, b.symbols, format_state(b.next)) for bs, b in zip(bit_strings, ordered)
        )
    return ModulationCode(spec, depth, format_state(spec.start_state), out, dict(metadata or {}))


def code_from_policy(policy, metadata: dict | None = None) -> ModulationCode:
    return code_from_table(policy.spec, policy.depth, policy.transition_table(), metadata)


def mcsk_code(spec: ChannelSpec) -> ModulationCode:
    """Binary MCSK: bit 0 sends a gap, bit 1 sends M1 in odd slots and M2 in even slots."""
    if (spec.k, spec.num_types) != (1, 2):
        raise UnsupportedSpecError("MCSK is defined for k=1, N=2 only")
    table = {}
    for window in ("-", "M2"):
        table[f"{window}|odd"] = (
            CodeEntry("0", (GAP,), "-|even"),
            CodeEntry("1", (1,), "M1|even"),
        )
    for window in ("-", "M1"):
        table[f"{window}|even"] = (
            CodeEntry("0", (GAP,), "-|odd"),
            CodeEntry("1", (2,), "M2|odd"),
        )
    return ModulationCode(spec, 1, "-|odd", table, {"rate": 1.0, "scheme": "MCSK"})


# -- validation ---------------------------------------------------------------

def _prefix_clashes(words: Sequence[Sequence]) -> list[tuple]:
    clashes = []
    ordered = sorted(tuple(w) for w in words)
    for a, b in zip(ordered, ordered[1:]):
        if b[: len(a)] == a:
            clashes.append((a, b))
    return clashes


def validate_code(code: ModulationCode) -> list[str]:
    """Every violated invariant, as human-readable strings (empty means valid)."""
    problems: list[str] = []
    spec, k = code.spec, code.spec.k
    if code.start not in code.table:
        problems.append(f"start state {code.start!r} has no entries")
    windows: dict[str, State] = {}
    for name in code.table:
        try:
            w = code.window_of(name)
        except ValueError:
            problems.append(f"state {name!r}: unparseable window")
            continue
        if not is_valid_state(w, spec):
            problems.append(f"state {name!r}: window is not a valid state")
            continue
        windows[name] = w
    if code.start in windows and any(s != GAP for s in windows[code.start]):
        problems.append(f"start state {code.start!r} is not the all-gap window")

    for name, entries in code.table.items():
        if not entries:
            problems.append(f"state {name!r}: no entries")
            continue
        bit_strings = [e.bits for e in entries]
        if any(set(b) - {"0", "1"} for b in bit_strings):
            problems.append(f"state {name!r}: bit strings must use only 0/1")
        kraft = sum((Fraction(1, 2 ** len(b)) for b in bit_strings), Fraction(0))
        if kraft != 1:
            problems.append(f"state {name!r}: Kraft sum is {kraft}, not 1")
        for a, b in _prefix_clashes(bit_strings):
            problems.append(f"state {name!r}: bit string {''.join(a)!r} is a prefix of {''.join(b)!r}")
        for a, b in _prefix_clashes([e.symbols for e in entries]):
            problems.append(
                f"state {name!r}: symbols {format_symbols(a)!r} are a prefix of {format_symbols(b)!r}"
            )
        window = windows.get(name)
        for e in entries:
            label = f"state {name!r}, bits {e.bits!r}"
            if not e.symbols:
                problems.append(f"{label}: empty symbol string")
                continue
            if len(e.symbols) > code.depth:
                problems.append(f"{label}: {len(e.symbols)} symbols exceed depth {code.depth}")
            if any(s < 0 or s > spec.num_types for s in e.symbols):
                problems.append(f"{label}: symbol outside the alphabet")
            if window is None:
                continue
            full = window + e.symbols
            if not is_isi_free(full, k):
                problems.append(f"{label}: {format_symbols(full)!r} is not ISI-free")
            if e.next not in code.table:
                problems.append(f"{label}: next state {e.next!r} is undefined")
            elif e.next in windows and windows[e.next] != full[-k:]:
                problems.append(
                    f"{label}: next state {e.next!r} does not match window {format_state(full[-k:])!r}"
                )
    return problems


# -- streaming ----------------------------------------------------------------

def _bit_maps(code: ModulationCode) -> dict[str, dict[str, CodeEntry]]:
    return {s: {e.bits: e for e in entries} for s, entries in code.table.items()}


def _symbol_maps(code: ModulationCode) -> dict[str, dict[tuple[int, ...], CodeEntry]]:
    return {s: {e.symbols: e for e in entries} for s, entries in code.table.items()}


class StreamEncoder:
    """Feeds bits through the code one codeword at a time."""

    def __init__(self, code: ModulationCode) -> None:
        self.code = code
        self._maps = _bit_maps(code)
        self._longest = {s: max(len(b) for b in m) for s, m in self._maps.items()}
        self.state = code.start
        self._pending = ""
        self.n_bits = 0
        self.n_symbols = 0

    def feed(self, bits: str) -> list[int]:
        out: list[int] = []
        table = self._maps[self.state]
        longest = self._longest[self.state]
        buf = self._pending
        for bit in bits:
            if not buf:
                forced = 0
                while "" in table:
                    entry = table[""]
                    out.extend(entry.symbols)
                    self.state = entry.next
                    table = self._maps[self.state]
                    longest = self._longest[self.state]
                    forced += 1
                    if forced > len(self._maps):
                        raise MalformedCodeError("code loops without consuming bits")
            buf += bit
            entry = table.get(buf)
            if entry is None:
                if len(buf) >= longest:
                    raise MalformedCodeError(
                        f"bit prefix {buf!r} matches no codeword at state {self.state!r}"
                    )
                continue
            out.extend(entry.symbols)
            self.state = entry.next
            table = self._maps[self.state]
            longest = self._longest[self.state]
            buf = ""
        self.n_bits += len(bits)
        self.n_symbols += len(out)
        self._pending = buf
        return out

    def flush(self) -> tuple[list[int], int]:
        """Complete a partial codeword with 0-bits; returns (symbols, pad count)."""
        pad = 0
        out: list[int] = []
        while self._pending:
            out.extend(self.feed("0"))
            self.n_bits -= 1
            pad += 1
        return out, pad


class StreamDecoder:
    """Inverse of :class:`StreamEncoder`; holds at most ``depth + k`` symbols."""

    def __init__(self, code: ModulationCode) -> None:
        self.code = code
        self._maps = _symbol_maps(code)
        self.state = code.start
        self._window = code.window_of(code.start)
        self._pending: tuple[int, ...] = ()
        self.capacity = code.depth + code.spec.k
        self.max_buffer = len(self._window)

    @property
    def buffered(self) -> int:
        return len(self._window) + len(self._pending)

    def feed(self, symbols: Iterable[int]) -> str:
        parts: list[str] = []
        for sym in symbols:
            self._pending += (sym,)
            occupancy = len(self._window) + len(self._pending)
            if occupancy > self.capacity:
                raise DesyncError(
                    f"no codeword matches {format_symbols(self._pending)!r} at state {self.state!r}"
                )
            self.max_buffer = max(self.max_buffer, occupancy)
            entry = self._maps[self.state].get(self._pending)
            if entry is None:
                continue
            parts.append(entry.bits)
            self._window = (self._window + self._pending)[-self.code.spec.k:]
            self.state = entry.next
            self._pending = ()
        return "".join(parts)

    def finish(self) -> None:
        if self._pending:
            raise DesyncError(
                f"stream ends inside a codeword: {format_symbols(self._pending)!r} at state {self.state!r}"
            )


def encode(code: ModulationCode, bits: str) -> tuple[list[int], int]:
    """Encode a 0/1 string; returns (symbols, number of 0-bits padded at the end)."""
    enc = StreamEncoder(code)
    symbols = enc.feed(bits)
    tail, pad = enc.flush()
    return symbols + tail, pad


def decode(code: ModulationCode, symbols: Sequence[int], n_bits: int) -> str:
    dec = StreamDecoder(code)
    bits = dec.feed(symbols)
    dec.finish()
    if len(bits) < n_bits:
        raise DesyncError(f"stream carries {len(bits)} bits, header promises {n_bits}")
    return bits[:n_bits]


def format_stream(symbols: Sequence[int], n_bits: int) -> str:
    return f"n_bits={n_bits}\n{format_symbols(symbols)}\n"


def parse_stream(text: str) -> tuple[list[int], int]:
    header, _, body = text.partition("\n")
    key, _, value = header.strip().partition("=")
    if key != "n_bits" or not value.strip().isdigit():
        raise MalformedCodeError(f"bad stream header {header!r}; expected n_bits=<int>")
    return list(parse_symbols(body)), int(value)
