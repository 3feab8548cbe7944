"""Decomposable structure scores for discrete Bayesian networks.

Two criteria are provided, both decomposable over (child, parent-set)
families and score-equivalent across Markov-equivalent DAGs:

* ``bic``: maximized multinomial log-likelihood of the family minus
  ``0.5 * log(N) * (S_child - 1) * S_parents`` (natural log throughout;
  empty cells contribute nothing, i.e. 0*log(0) = 0).
* ``bdeu``: log Dirichlet-multinomial marginal likelihood with uniform
  hyperparameters ``ess / (S_child * S_parents)`` per table cell.

``edge_gain`` is the score change for adding one directed edge on top of a
given parent set, plus the log edge prior ``alpha`` (prior over structures
proportional to exp(alpha * edge_count)). ``gamma`` is the collider
acceptance threshold used during orientation and ``edge_threshold``
(default gamma/2) gates edge inclusion/elimination during search.

Degrees of freedom come from declared schema arities, never from observed
support. A hook for adjusted degrees of freedom is deliberately absent.

Scores here are pure functions of (data, config); the cache is a plain
memo keyed by (child, sorted parents) whose entries must never depend on
evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dataset import DataTable, Schema, counts
from .graph import Dag

CRITERIA = ("bic", "bdeu")


@dataclass(frozen=True)
class ScoreConfig:
    criterion: str = "bic"
    ess: float = 5.0
    alpha: float = 0.0
    gamma: float = 6.0
    edge_threshold: float | None = None

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.ess <= 0:
            raise ValueError("equivalent sample size must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.edge_threshold is None:
            object.__setattr__(self, "edge_threshold", self.gamma / 2.0)
        if self.edge_threshold < 0:
            raise ValueError("edge_threshold must be non-negative")


class ScoreCache:
    """Memo from (child, sorted parent tuple) to family score.

    Valid for exactly one (data, config) pair. ``memoize=False`` keeps the
    computation counter but recomputes every call (used to measure what the
    cache saves). Lookups and idempotent inserts are safe to interleave.
    """

    def __init__(self, memoize: bool = True):
        self.memoize = memoize
        self.hits = 0
        self.misses = 0
        self.computations = 0
        self._store: dict[tuple[int, tuple[int, ...]], float] = {}

    def __len__(self) -> int:
        return len(self._store)


def degrees_of_freedom(schema: Schema, a: int, b: int, parents) -> int:
    """(S_a - 1)(S_b - 1) * product of parent arities; empty product is 1."""
    ps = tuple(parents)
    if a == b or a in ps or b in ps:
        raise ValueError("a, b must be distinct and disjoint from the parent set")
    s_pi = 1
    for p in ps:
        s_pi *= schema.arity(p)
    return (schema.arity(a) - 1) * (schema.arity(b) - 1) * s_pi


def _family_bic(data: DataTable, child: int, parents: tuple[int, ...]) -> float:
    table = counts(data, parents + (child,)).counts.astype(float)
    flat = table.reshape(-1, data.schema.arity(child))
    row_tot = flat.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(flat > 0, flat * np.log(flat / row_tot), 0.0)
    loglik = float(terms.sum())
    s_pi = int(np.prod(data.schema.arities(parents), dtype=np.int64)) if parents else 1
    dim = (data.schema.arity(child) - 1) * s_pi
    return loglik - 0.5 * math.log(data.n_rows) * dim


def _family_bdeu(data: DataTable, ess: float, child: int, parents: tuple[int, ...]) -> float:
    s_child = data.schema.arity(child)
    s_pi = int(np.prod(data.schema.arities(parents), dtype=np.int64)) if parents else 1
    table = counts(data, parents + (child,)).counts.astype(float)
    flat = table.reshape(s_pi, s_child)
    a_cell = ess / (s_child * s_pi)
    a_row = ess / s_pi
    row_tot = flat.sum(axis=1)
    cell_part = float(np.sum(gammaln(flat + a_cell) - gammaln(a_cell)))
    row_part = float(np.sum(gammaln(a_row) - gammaln(a_row + row_tot)))
    return cell_part + row_part


def family_score(data: DataTable, config: ScoreConfig, child: int, parents, cache: ScoreCache | None = None) -> float:
    """Log family score of `child` given `parents` under the configured criterion."""
    ps = tuple(sorted(int(p) for p in parents))
    if int(child) in ps:
        raise ValueError("child cannot be its own parent")
    key = (int(child), ps)
    if cache is not None and cache.memoize and key in cache._store:
        cache.hits += 1
        return cache._store[key]
    if config.criterion == "bic":
        value = _family_bic(data, int(child), ps)
    else:
        value = _family_bdeu(data, config.ess, int(child), ps)
    if cache is not None:
        cache.misses += 1
        cache.computations += 1
        if cache.memoize:
            cache._store[key] = value
    return value


def edge_gain(data: DataTable, config: ScoreConfig, a: int, b: int, parents, cache: ScoreCache | None = None) -> float:
    """Score change for adding a -> b when b already has `parents`, plus the edge prior.

    Symmetric in (a, b) for both criteria up to rounding, so it also scores
    the undirected association between a and b given the conditioning set.
    """
    ps = frozenset(int(p) for p in parents)
    if a == b or a in ps or b in ps:
        raise ValueError("a, b must be distinct and disjoint from the parent set")
    return (
        family_score(data, config, b, ps | {a}, cache)
        - family_score(data, config, b, ps, cache)
        + config.alpha
    )


def loglik_ratio(data: DataTable, a: int, b: int, parents) -> float:
    """Maximized log-likelihood ratio for the a--b dependence given a parent set.

    Computed directly from the joint counts over (parents, a, b):
    ``sum N_ab,pi * log(N_ab,pi * N_++,pi / (N_a+,pi * N_+b,pi))``. This is an
    independent route to the likelihood part of the BIC edge gain and is used
    to cross-check the family-difference computation.
    """
    ps = tuple(sorted(int(p) for p in parents))
    if a == b or a in ps or b in ps:
        raise ValueError("a, b must be distinct and disjoint from the parent set")
    table = counts(data, ps + (int(a), int(b))).counts.astype(float)
    s_a = data.schema.arity(a)
    s_b = data.schema.arity(b)
    cube = table.reshape(-1, s_a, s_b)
    n_pi = cube.sum(axis=(1, 2), keepdims=True)
    n_a = cube.sum(axis=2, keepdims=True)
    n_b = cube.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(cube > 0, cube * np.log(cube * n_pi / (n_a * n_b)), 0.0)
    return float(terms.sum())


def total_score(data: DataTable, config: ScoreConfig, dag: Dag, cache: ScoreCache | None = None) -> float:
    """Sum of family scores plus alpha times the edge count."""
    fam = math.fsum(
        family_score(data, config, child, dag.parents[child], cache) for child in range(dag.n)
    )
    return fam + config.alpha * dag.edge_count
