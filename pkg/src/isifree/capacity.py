"""Unconstrained-delay capacity: log2 of the Perron eigenvalue of the constraint graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError
from .graph import ChannelSpec, ConstraintGraph, State, build_constraint_graph

_SPARSE_THRESHOLD = 2000


@dataclass(frozen=True)
class CapacityResult:
    lam: float
    capacity_bits_per_symbol: float
    iterations: int
    residual: float


def adjacency_matrix(graph: ConstraintGraph, sparse: bool = False):
    """Edge-count matrix in canonical state order (dense int array unless ``sparse``)."""
    n = len(graph.states)
    rows = [graph.index[e.source] for e in graph.edges]
    cols = [graph.index[e.target] for e in graph.edges]
    mat = csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
    return mat if sparse else mat.toarray()


def is_irreducible(A) -> bool:
    n_comp, _ = connected_components(csr_matrix(A), directed=True, connection="strong")
    return n_comp == 1


def spectral_radius(
    A,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    require_irreducible: bool = False,
) -> CapacityResult:
    """Perron eigenvalue of a nonnegative matrix by normalized power iteration.

    Starts from the all-ones vector.  Stops when ``||A x - lam x|| <= tol``
    with ``x`` normalized to unit 1-norm.  A periodic or reducible input whose
    iterates never settle raises :class:`ConvergenceError`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if require_irreducible and not is_irreducible(A):
        raise ValueError("matrix is not irreducible (graph not strongly connected)")
    A = A if hasattr(A, "tocsr") else np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or n == 0:
        raise ValueError("A must be a nonempty square matrix")
    x = np.full(n, 1.0 / n)
    lam = 0.0
    residual = math.inf
    for it in range(1, max_iter + 1):
        y = np.asarray(A @ x, dtype=float).ravel()
        lam = float(y.sum())  # x sums to one and A is nonnegative
        if lam <= 0.0:
            raise ValueError("matrix has zero spectral radius on the start vector")
        residual = float(np.linalg.norm(y - lam * x, ord=np.inf))
        x = y / lam
        if residual <= tol:
            return CapacityResult(lam, math.log2(lam), it, residual)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {residual:.3g}); "
        "the matrix may be periodic or reducible"
    )


def graph_capacity(graph: ConstraintGraph, tol: float = 1e-10) -> CapacityResult:
    A = adjacency_matrix(graph, sparse=len(graph.states) > _SPARSE_THRESHOLD)
    if not is_irreducible(A):
        raise ValueError("constraint graph is not strongly connected")
    return spectral_radius(A, tol=tol)


def channel_capacity(spec: ChannelSpec, tol: float = 1e-10) -> CapacityResult:
    return graph_capacity(build_constraint_graph(spec), tol=tol)


def count_paths(graph: ConstraintGraph, start: State, m: int) -> int:
    """Exact number of length-m walks leaving ``start`` (arbitrary precision)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    succ = [[graph.index[t] for _, t in graph.successors(s)] for s in graph.states]
    counts = [1] * len(graph.states)
    for _ in range(m):
        counts = [sum(counts[w] for w in nbrs) for nbrs in succ]
    return counts[graph.index[start]]


def path_count_table(graph: ConstraintGraph, start: State, m_max: int) -> list[tuple[int, int, float]]:
    """Rows ``(m, N(m), log2 N(m) / m)`` for m = 1..m_max."""
    succ = [[graph.index[t] for _, t in graph.successors(s)] for s in graph.states]
    counts = [1] * len(graph.states)
    s0 = graph.index[start]
    rows = []
    for m in range(1, m_max + 1):
        counts = [sum(counts[w] for w in nbrs) for nbrs in succ]
        n_m = counts[s0]
        rows.append((m, n_m, math.log2(n_m) / m))
    return rows
