"""Delay-limited code synthesis."""

from ..markov import Branch, analytic_rate, state_rates, stationary_distribution
from .bruteforce import brute_force_synthesize
from .dp import DelayLimitedProblem, GEvaluation, SynthesisResult, evaluate_G, synthesize
from .ghc import dyadic_score, ghc, ghc_log, ghc_score
from .policy import Action, Policy
from .search import FAMILIES, CutSearch, count_cuts, iter_cuts, merge_cut, optimize_state

__all__ = [
    "Action",
    "Branch",
    "CutSearch",
    "DelayLimitedProblem",
    "FAMILIES",
    "GEvaluation",
    "Policy",
    "SynthesisResult",
    "analytic_rate",
    "brute_force_synthesize",
    "count_cuts",
    "dyadic_score",
    "evaluate_G",
    "ghc",
    "ghc_log",
    "ghc_score",
    "iter_cuts",
    "merge_cut",
    "optimize_state",
    "state_rates",
    "stationary_distribution",
    "synthesize",
]
