"""Parameterized Bayesian networks over categorical variables.

Parameters are posterior means under a uniform Dirichlet prior with a small
equivalent sample size, so fitted tables are strictly positive and joint
probabilities stay finite. Hand-built or generated networks may contain
zero cells (degenerate distributions are allowed there).

The network file format (normative, version 1) is line-based text:

    bayesnet 1
    var <name> <state0> <state1> ...       # one per variable, index order
    parents <child> [<parent> ...]          # one per variable, index order
    cpt <child>                             # then one row per parent config
    <p0> <p1> ... <p_{arity-1}>

CPT rows are ordered row-major over the listed parents with the first
listed parent as the most significant digit. ``#`` starts a comment.

BayesNet is immutable after construction; sampling takes an owned random
generator, and cross-validation folds are independent given their seeds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import DataTable, Schema, Variable, counts
from .errors import InputError
from .graph import Dag
from .scores import ScoreCache, ScoreConfig
from .search import SearchConfig, run_search
from .util import as_rng

NET_HEADER = "bayesnet 1"


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table: rows are parent configs, columns child states."""

    child: int
    parents: tuple[int, ...]
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2:
            raise InputError("cpt table must be 2-d (parent configs x child states)")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise InputError("cpt entries must be finite and non-negative")
        sums = t.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise InputError(f"cpt row for child {self.child} sums to {sums.max():.12g}, not 1")
        t = t / sums[:, None]
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))


@dataclass(frozen=True)
class BayesNet:
    schema: Schema
    dag: Dag
    cpts: tuple[Cpt, ...]

    def __post_init__(self):
        if self.dag.n != self.schema.n or len(self.cpts) != self.schema.n:
            raise InputError("schema, dag, and cpt list disagree on variable count")
        for v, cpt in enumerate(self.cpts):
            if cpt.child != v:
                raise InputError(f"cpt {v} is for child {cpt.child}")
            if set(cpt.parents) != set(self.dag.parents[v]):
                raise InputError(f"cpt parents for {v} do not match the graph")
            dims = [self.schema.arity(p) for p in cpt.parents]
            expected = (int(np.prod(dims)) if dims else 1, self.schema.arity(v))
            if cpt.table.shape != expected:
                raise InputError(
                    f"cpt for {v} has shape {cpt.table.shape}, expected {expected}"
                )

    def close_to(self, other: "BayesNet", atol: float = 1e-12) -> bool:
        if self.schema != other.schema or self.dag != other.dag:
            return False
        return all(
            a.parents == b.parents and np.allclose(a.table, b.table, atol=atol, rtol=0.0)
            for a, b in zip(self.cpts, other.cpts)
        )


def _parent_row_indices(schema: Schema, parents: tuple[int, ...], rows: np.ndarray) -> np.ndarray:
    """Row index into a CPT for each data row (vectorized mixed radix)."""
    if not parents:
        return np.zeros(rows.shape[0], dtype=np.int64)
    dims = tuple(schema.arity(p) for p in parents)
    return np.ravel_multi_index(tuple(rows[:, p] for p in parents), dims)


def fit_parameters(data: DataTable, dag: Dag, ess: float = 5.0) -> BayesNet:
    """Posterior-mean CPTs under the uniform equivalent-sample-size prior.

    Each cell is (N_xpi + ess/(S_x*S_pi)) / (N_pi + ess/S_pi); with no data
    every row is the uniform prior mean.
    """
    if ess <= 0:
        raise ValueError("equivalent sample size must be positive")
    schema = data.schema
    cpts = []
    for child in range(schema.n):
        parents = tuple(sorted(dag.parents[child]))
        s_child = schema.arity(child)
        s_pi = int(np.prod([schema.arity(p) for p in parents])) if parents else 1
        table = counts(data, parents + (child,)).counts.reshape(s_pi, s_child).astype(float)
        a_cell = ess / (s_child * s_pi)
        a_row = ess / s_pi
        theta = (table + a_cell) / (table.sum(axis=1, keepdims=True) + a_row)
        cpts.append(Cpt(child, parents, theta))
    return BayesNet(schema, dag, tuple(cpts))


def joint_log_prob(net: BayesNet, assignment) -> float:
    """Log joint probability of one full assignment (may be -inf on zero cells)."""
    row = np.asarray(assignment, dtype=np.int64).reshape(1, -1)
    if row.shape[1] != net.schema.n:
        raise ValueError("assignment must cover every variable")
    return float(joint_log_prob_rows(net, row)[0])


def joint_log_prob_rows(net: BayesNet, rows: np.ndarray) -> np.ndarray:
    """Vectorized log joint probability for a matrix of full assignments."""
    rows = np.asarray(rows, dtype=np.int64)
    out = np.zeros(rows.shape[0])
    with np.errstate(divide="ignore"):
        for child in range(net.schema.n):
            cpt = net.cpts[child]
            ridx = _parent_row_indices(net.schema, cpt.parents, rows)
            out += np.log(cpt.table[ridx, rows[:, child]])
    return out


def sample(net: BayesNet, n: int, rng=None) -> DataTable:
    """Ancestral sampling: draw each node in topological order given its parents."""
    if n < 0:
        raise ValueError("sample count must be non-negative")
    gen = as_rng(rng)
    rows = np.zeros((n, net.schema.n), dtype=np.int64)
    for child in net.dag.topological_order():
        cpt = net.cpts[child]
        ridx = _parent_row_indices(net.schema, cpt.parents, rows)
        cum = np.cumsum(cpt.table[ridx], axis=1)
        u = gen.random(n)
        # rounding can leave the last cumulative slightly below 1
        rows[:, child] = np.minimum((u[:, None] > cum).sum(axis=1),
                                    net.schema.arity(child) - 1)
    return DataTable(net.schema, rows)


def kl_divergence(fold: DataTable, net: BayesNet) -> float:
    """KL from the fold's empirical distribution to the network's joint.

    Sums p_hat(v) * (log p_hat(v) - log q(v)) over the fold's distinct
    configurations; finite whenever the network's tables are positive.
    """
    if fold.n_rows == 0:
        raise ValueError("fold must be non-empty")
    if fold.schema != net.schema:
        raise ValueError("fold schema does not match the network")
    configs, freq = np.unique(fold.rows, axis=0, return_counts=True)
    p_hat = freq / fold.n_rows
    log_q = joint_log_prob_rows(net, configs)
    return float(np.sum(p_hat * (np.log(p_hat) - log_q)))


@dataclass(frozen=True)
class XvReport:
    strategy: str
    kl_values: tuple[float, ...]
    kl_mean: float
    kl_std: float
    edge_counts: tuple[int, ...]

    @classmethod
    def from_folds(cls, strategy: str, kl_values, edge_counts) -> "XvReport":
        kl = tuple(float(k) for k in kl_values)
        return cls(
            strategy=strategy,
            kl_values=kl,
            kl_mean=float(np.mean(kl)),
            kl_std=float(np.std(kl, ddof=1)) if len(kl) > 1 else 0.0,
            edge_counts=tuple(int(e) for e in edge_counts),
        )


def fold_indices(n_rows: int, folds: int, rng=None) -> list[np.ndarray]:
    """Shuffle 0..n_rows-1 and split into near-equal folds (sizes differ by at most 1)."""
    if n_rows < folds:
        raise ValueError(f"need at least {folds} rows for {folds}-fold cross validation")
    perm = as_rng(rng).permutation(n_rows)
    return np.array_split(perm, folds)


def cross_validate(data: DataTable, config: ScoreConfig, search_config: SearchConfig, folds: int = 5, rng=None, structure: Dag | None = None) -> XvReport:
    """K-fold cross validation scored by held-out KL divergence.

    Rows are shuffled once (seeded) and split into near-equal folds. Per
    fold, structure is learned on the training part (or taken from
    ``structure`` if given), parameters are fitted with the configured
    equivalent sample size, and KL is computed on the held-out part.
    """
    gen = as_rng(rng)
    parts = fold_indices(data.n_rows, folds, gen)
    fold_seeds = gen.integers(0, 2**63 - 1, size=folds)
    kl_values = []
    edge_counts = []
    for i in range(folds):
        test_idx = parts[i]
        train_idx = np.concatenate([parts[j] for j in range(folds) if j != i])
        train = DataTable(data.schema, data.rows[train_idx])
        test = DataTable(data.schema, data.rows[test_idx])
        if structure is None:
            dag = run_search(train, config, search_config, rng=as_rng(int(fold_seeds[i])), cache=ScoreCache()).dag
        else:
            dag = structure
        net = fit_parameters(train, dag, ess=config.ess)
        kl_values.append(kl_divergence(test, net))
        edge_counts.append(dag.edge_count)
    return XvReport.from_folds(search_config.strategy, kl_values, edge_counts)


def save_network(net: BayesNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(NET_HEADER + "\n")
        names = net.schema.names()
        for v in net.schema.variables:
            fh.write("var " + v.name + " " + " ".join(v.states) + "\n")
        for child in range(net.schema.n):
            cpt = net.cpts[child]
            fh.write("parents " + names[child])
            for p in cpt.parents:
                fh.write(" " + names[p])
            fh.write("\n")
            fh.write("cpt " + names[child] + "\n")
            for row in cpt.table:
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def load_network(path) -> BayesNet:
    """Parse and validate a version-1 network file; rows are renormalized exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in raw if ln]
    if not lines or lines[0] != NET_HEADER:
        raise InputError(f"{path}: expected header {NET_HEADER!r}")
    variables: list[Variable] = []
    pos = 1
    while pos < len(lines) and lines[pos].startswith("var "):
        parts = lines[pos].split()
        if len(parts) < 4:
            raise InputError(f"{path}: variable needs a name and >= 2 states: {lines[pos]!r}")
        variables.append(Variable(parts[1], tuple(parts[2:])))
        pos += 1
    if not variables:
        raise InputError(f"{path}: no variable declarations")
    schema = Schema(tuple(variables))
    name_to_idx = {v.name: i for i, v in enumerate(variables)}
    parent_lists: dict[int, tuple[int, ...]] = {}
    tables: dict[int, list[list[float]]] = {}
    while pos < len(lines):
        parts = lines[pos].split()
        if parts[0] == "parents":
            try:
                child = name_to_idx[parts[1]]
                parent_lists[child] = tuple(name_to_idx[p] for p in parts[2:])
            except KeyError as exc:
                raise InputError(f"{path}: unknown variable {exc.args[0]!r}") from None
            pos += 1
        elif parts[0] == "cpt":
            if len(parts) != 2 or parts[1] not in name_to_idx:
                raise InputError(f"{path}: bad cpt line {lines[pos]!r}")
            child = name_to_idx[parts[1]]
            if child not in parent_lists:
                raise InputError(f"{path}: cpt for {parts[1]!r} before its parents line")
            dims = [schema.arity(p) for p in parent_lists[child]]
            n_rows = int(np.prod(dims)) if dims else 1
            pos += 1
            rows = []
            for _ in range(n_rows):
                if pos >= len(lines):
                    raise InputError(f"{path}: cpt for {parts[1]!r} is truncated")
                try:
                    row = [float(x) for x in lines[pos].split()]
                except ValueError:
                    raise InputError(f"{path}: non-numeric cpt row {lines[pos]!r}") from None
                if len(row) != schema.arity(child):
                    raise InputError(
                        f"{path}: cpt row for {parts[1]!r} has {len(row)} entries, "
                        f"expected {schema.arity(child)}"
                    )
                rows.append(row)
                pos += 1
            tables[child] = rows
        else:
            raise InputError(f"{path}: unexpected line {lines[pos]!r}")
    missing = [variables[v].name for v in range(schema.n) if v not in parent_lists or v not in tables]
    if missing:
        raise InputError(f"{path}: missing parents/cpt sections for {missing}")
    try:
        dag = Dag(schema.n, tuple(frozenset(parent_lists[v]) for v in range(schema.n)))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    cpts = tuple(
        Cpt(v, parent_lists[v], np.asarray(tables[v], dtype=float)) for v in range(schema.n)
    )
    return BayesNet(schema, dag, cpts)


def random_network(n_vars: int, n_edges: int, arity_range=(2, 2), rng=None, concentration: float = 1.0, names=None) -> BayesNet:
    """Random ground-truth network: random DAG shape plus Dirichlet CPT rows.

    ``concentration`` is the symmetric Dirichlet parameter per row; 1 gives
    uniform-simplex rows, values < 1 give spikier (more strongly dependent)
    distributions.
    """
    max_edges = n_vars * (n_vars - 1) // 2
    if n_edges > max_edges:
        raise ValueError(f"{n_edges} edges infeasible for {n_vars} nodes (max {max_edges})")
    gen = as_rng(rng)
    lo, hi = arity_range
    if names is None:
        names = [f"x{i}" for i in range(n_vars)]
    arities = [int(gen.integers(lo, hi + 1)) for _ in range(n_vars)]
    schema = Schema(
        tuple(
            Variable(names[i], tuple(f"s{k}" for k in range(arities[i])))
            for i in range(n_vars)
        )
    )
    perm = gen.permutation(n_vars)
    possible = [(int(perm[i]), int(perm[j])) for i in range(n_vars) for j in range(i + 1, n_vars)]
    chosen = [possible[k] for k in gen.choice(len(possible), size=n_edges, replace=False)] if n_edges else []
    dag = Dag.from_edges(n_vars, chosen)
    cpts = []
    for child in range(n_vars):
        parents = tuple(sorted(dag.parents[child]))
        s_pi = int(np.prod([schema.arity(p) for p in parents])) if parents else 1
        table = gen.dirichlet([concentration] * schema.arity(child), size=s_pi)
        cpts.append(Cpt(child, parents, table))
    return BayesNet(schema, dag, tuple(cpts))
