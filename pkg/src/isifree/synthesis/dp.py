"""Delay-limited rate optimization.

The best long-run rate ``R*`` over per-state actions is the root of

    G(R) = max over policies of  E[bits per step] - R * E[symbols per step]

(average profit of a unichain MDP), which is strictly decreasing in ``R``.
``G`` is evaluated by relative value iteration and the root is bracketed by
bisection on ``[0, C(inf) + 0.01]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..capacity import graph_capacity
from ..codec import ModulationCode, code_from_policy
from ..errors import ConvergenceError
from ..graph import ChannelSpec, ConstraintGraph, State, build_constraint_graph, build_continuation_tree
from ..markov import analytic_rate, stationary_distribution
from .policy import Policy
from .search import DEFAULT_CUT_CAP, Cut, CutSearch

log = logging.getLogger(__name__)

VI_TOL = 1e-9
VI_MAX_ITER = 100_000
BISECTION_TOL = 1e-6
BISECTION_MAX_ITER = 60


@dataclass
class GEvaluation:
    R: float
    gain: float
    cost: np.ndarray
    choices: list[tuple[Cut, list[int | None]]]
    iterations: int


@dataclass
class SynthesisResult:
    spec: ChannelSpec
    depth: int
    family: str
    rate: float
    root: float
    policy: Policy
    stationary: dict[State, float]
    capacity_bound: float
    code: ModulationCode
    exact: bool
    bisection_steps: int
    samples: list[tuple[float, float]] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.capacity_bound - self.rate


class DelayLimitedProblem:
    """Precompiled search structures for one (spec, depth, family) instance."""

    def __init__(
        self,
        spec: ChannelSpec,
        depth: int,
        family: str = "block",
        cut_cap: int = DEFAULT_CUT_CAP,
        graph: ConstraintGraph | None = None,
    ) -> None:
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        self.spec = spec
        self.depth = depth
        self.family = family
        self.graph = graph or build_constraint_graph(spec)
        self.states = self.graph.states
        index = self.graph.index
        self.searches: list[CutSearch] = []
        for s in self.states:
            tree = build_continuation_tree(s, depth, spec)
            dest = [index[n.dest] for n in tree.nodes]
            self.searches.append(CutSearch(tree, dest, family, cut_cap))
        self.ref = index[spec.start_state]
        self._warm: np.ndarray | None = None

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.searches)

    def bellman(self, R: float, cost: np.ndarray) -> tuple[np.ndarray, list]:
        values = np.empty(len(self.states))
        choices = []
        for i, search in enumerate(self.searches):
            v, cut, lengths = search.best(R, cost)
            values[i] = v
            choices.append((cut, lengths))
        return values, choices

    def evaluate(
        self,
        R: float,
        tol: float = VI_TOL,
        max_iter: int = VI_MAX_ITER,
        warm_start: bool = True,
    ) -> GEvaluation:
        """Relative value iteration for the average profit at rate guess ``R``.

        Costs are re-anchored at the all-gap state every sweep; iteration stops
        when the span of ``T c - c`` drops below ``tol``.
        """
        if R < 0:
            raise ValueError("R must be >= 0")
        cost = self._warm.copy() if warm_start and self._warm is not None else np.zeros(len(self.states))
        for it in range(1, max_iter + 1):
            new, choices = self.bellman(R, cost)
            diff = new - cost
            span = float(diff.max() - diff.min())
            cost = new - new[self.ref]
            if span < tol:
                self._warm = cost
                gain = 0.5 * float(diff.max() + diff.min())
                return GEvaluation(R, gain, cost, choices, it)
        raise ConvergenceError(
            f"value iteration at R={R} did not converge in {max_iter} sweeps (span {span:.3g})"
        )

    def policy(self, choices: Sequence[tuple[Cut, list[int | None]]]) -> Policy:
        actions = {
            s: search.action(cut, lengths)
            for s, search, (cut, lengths) in zip(self.states, self.searches, choices)
        }
        return Policy(self.spec, self.depth, actions)

    def solve(self, tol: float = BISECTION_TOL, max_iter: int = BISECTION_MAX_ITER) -> SynthesisResult:
        if tol <= 0:
            raise ValueError("tol must be positive")
        cap = graph_capacity(self.graph).capacity_bits_per_symbol
        lo, hi = 0.0, cap + 0.01
        at_lo = self.evaluate(lo)
        samples = [(lo, at_lo.gain)]
        if at_lo.gain <= 0:
            raise ConvergenceError(f"G(0) = {at_lo.gain} is not positive; bracket invalid")
        at_hi = self.evaluate(hi)
        samples.append((hi, at_hi.gain))
        if at_hi.gain >= 0:
            raise ConvergenceError(f"G({hi}) = {at_hi.gain} is not negative; bracket invalid")
        steps = 0
        while hi - lo > tol and steps < max_iter:
            mid = 0.5 * (lo + hi)
            ev = self.evaluate(mid)
            samples.append((mid, ev.gain))
            steps += 1
            if ev.gain > 0:
                lo, at_lo = mid, ev
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        # RVI from scratch keeps the final policy independent of the bisection path
        final = self.evaluate(lo, warm_start=False)
        policy = self.policy(final.choices)
        pi = stationary_distribution(policy)
        rate = analytic_rate(policy, pi)
        if abs(rate - root) > 10 * tol:
            raise ConvergenceError(
                f"policy rate {rate:.9f} disagrees with bisection root {root:.9f}"
            )
        code = code_from_policy(
            policy, {"rate": rate, "family": self.family, "capacity": cap}
        )
        log.info(
            "k=%d N=%d d=%d %s: rate %.6f (capacity %.6f, %d bisection steps)",
            self.spec.k, self.spec.num_types, self.depth, self.family, rate, cap, steps,
        )
        return SynthesisResult(
            spec=self.spec,
            depth=self.depth,
            family=self.family,
            rate=rate,
            root=root,
            policy=policy,
            stationary=pi,
            capacity_bound=cap,
            code=code,
            exact=self.exact,
            bisection_steps=steps,
            samples=sorted(samples),
        )


def evaluate_G(
    R: float,
    spec: ChannelSpec,
    d: int,
    tol: float = VI_TOL,
    family: str = "block",
    cut_cap: int = DEFAULT_CUT_CAP,
) -> tuple[float, Policy]:
    """Optimal average profit per step at rate guess ``R`` and the greedy policy."""
    problem = DelayLimitedProblem(spec, d, family, cut_cap)
    ev = problem.evaluate(R, tol=tol)
    return ev.gain, problem.policy(ev.choices)


def synthesize(
    spec: ChannelSpec,
    d: int,
    tol: float = BISECTION_TOL,
    family: str = "block",
    cut_cap: int = DEFAULT_CUT_CAP,
) -> SynthesisResult:
    """Best delay-``d`` code for ``spec`` within the chosen action family."""
    return DelayLimitedProblem(spec, d, family, cut_cap).solve(tol)
