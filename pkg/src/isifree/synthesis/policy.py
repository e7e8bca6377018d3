"""Actions and policies of the delay-limited code design problem."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..graph import ChannelSpec, State, format_state, format_symbols
from ..markov import Branch


@dataclass(frozen=True)
class Action:
    """The chosen prefix-free string set U(s) with its codeword lengths."""

    branches: tuple[Branch, ...]

    def kraft(self) -> Fraction:
        return sum((Fraction(1, 2**b.bits) for b in self.branches), Fraction(0))

    def expected_bits(self) -> float:
        return sum(b.prob * b.bits for b in self.branches)

    def expected_symbols(self) -> float:
        return sum(b.prob * b.m for b in self.branches)

    def rate(self) -> float:
        return self.expected_bits() / self.expected_symbols()

    def describe(self) -> str:
        return ", ".join(f"{format_symbols(b.symbols)}/{b.bits}" for b in self.branches)


@dataclass(frozen=True)
class Policy:
    spec: ChannelSpec
    depth: int
    actions: Mapping[State, Action]

    @property
    def start(self) -> State:
        return self.spec.start_state

    def transition_table(self) -> dict[State, tuple[Branch, ...]]:
        return {s: a.branches for s, a in self.actions.items()}

    def state_rates(self) -> dict[State, float]:
        return {s: a.rate() for s, a in self.actions.items()}

    def describe(self) -> str:
        return "\n".join(f"{format_state(s)}: {a.describe()}" for s, a in self.actions.items())
