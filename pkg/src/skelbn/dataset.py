"""Categorical data tables and exact contingency counts.

A Schema fixes variable names, state labels, and arities up front: scoring
depends on declared arities, not on whichever states happen to appear in a
particular query. Count tables use a dense mixed-radix layout with the first
listed variable as the most significant digit (numpy C order), so a flat
index is the joint configuration code.

DataTable and ContingencyTable are immutable after construction; every
operation here is pure and safe to share across threads.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

SCHEMA_HEADER = "schema 1"


@dataclass(frozen=True)
class Variable:
    name: str
    states: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Schema:
    variables: tuple[Variable, ...]

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise InputError("duplicate variable names in schema")
        for v in self.variables:
            if v.arity < 2:
                raise InputError(f"variable {v.name!r} has arity {v.arity}; need >= 2")
            if len(set(v.states)) != v.arity:
                raise InputError(f"variable {v.name!r} has duplicate state labels")

    @classmethod
    def from_arities(cls, pairs) -> "Schema":
        """Build a schema from (name, arity) pairs with default labels 0..k-1."""
        return cls(tuple(Variable(n, tuple(str(s) for s in range(k))) for n, k in pairs))

    @property
    def n(self) -> int:
        return len(self.variables)

    def arity(self, i: int) -> int:
        return self.variables[i].arity

    def arities(self, var_indices=None) -> tuple[int, ...]:
        if var_indices is None:
            var_indices = range(self.n)
        return tuple(self.variables[i].arity for i in var_indices)

    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class DataTable:
    """Complete categorical data: one row per case, cells are state indices."""

    schema: Schema
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != self.schema.n:
            rows = rows.reshape(-1, self.schema.n)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if rows.size:
            if rows.min() < 0:
                raise InputError("negative state index in data")
            for i in range(self.schema.n):
                if rows[:, i].max() >= self.schema.arity(i):
                    raise InputError(
                        f"state index out of range for variable {self.schema.variables[i].name!r}"
                    )

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_vars(self) -> int:
        return self.schema.n


@dataclass(frozen=True)
class ContingencyTable:
    """Exact joint counts over an ordered variable subset.

    ``counts`` has one axis per variable, in the order of ``variables``;
    the flat (C-order) index is the mixed-radix joint configuration with
    the first variable as the most significant digit.
    """

    variables: tuple[int, ...]
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index_of(self, config) -> int:
        """Flat configuration code of a full assignment over ``variables``."""
        if not self.variables:
            return 0
        return int(np.ravel_multi_index(tuple(config), self.counts.shape))

    def config_of(self, flat_index: int) -> tuple[int, ...]:
        if not self.variables:
            return ()
        return tuple(int(x) for x in np.unravel_index(flat_index, self.counts.shape))


def counts(data: DataTable, variables) -> ContingencyTable:
    """Joint counts over ``variables``; an empty list yields the single count N."""
    vs = tuple(int(v) for v in variables)
    if len(set(vs)) != len(vs):
        raise ValueError("duplicate variable index in counts query")
    for v in vs:
        if not 0 <= v < data.schema.n:
            raise ValueError(f"variable index {v} out of range")
    if not vs:
        return ContingencyTable((), np.asarray(data.n_rows, dtype=np.int64))
    dims = data.schema.arities(vs)
    size = int(np.prod(dims))
    if data.n_rows == 0:
        table = np.zeros(dims, dtype=np.int64)
    else:
        flat = np.ravel_multi_index(tuple(data.rows[:, v] for v in vs), dims)
        table = np.bincount(flat, minlength=size).reshape(dims)
    return ContingencyTable(vs, table)


def marginalize(table: ContingencyTable, drop: int) -> ContingencyTable:
    """Sum out one variable's axis."""
    if drop not in table.variables:
        raise ValueError(f"variable {drop} not in table")
    axis = table.variables.index(drop)
    kept = table.variables[:axis] + table.variables[axis + 1 :]
    return ContingencyTable(kept, table.counts.sum(axis=axis))


def load_schema(path) -> Schema:
    """Read a schema sidecar file: header line, then one `var` line per variable."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != SCHEMA_HEADER:
        raise InputError(f"{path}: expected header {SCHEMA_HEADER!r}")
    variables = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "var" or len(parts) < 4:
            raise InputError(f"{path}: bad schema line {ln!r}; need `var name s0 s1 ...`")
        variables.append(Variable(parts[1], tuple(parts[2:])))
    if not variables:
        raise InputError(f"{path}: schema declares no variables")
    return Schema(tuple(variables))


def save_schema(schema: Schema, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA_HEADER + "\n")
        for v in schema.variables:
            fh.write("var " + v.name + " " + " ".join(v.states) + "\n")


def load_csv(path, *, delimiter: str = ",", schema_file=None) -> DataTable:
    """Load a header-row CSV of discrete labels into a DataTable.

    Without a schema file, each column's labels are mapped to indices in
    first-appearance order and the arity is the number of distinct labels.
    A schema file pins both the label order and the arity (columns are
    matched to schema variables by header name).
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            table = list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not table:
        raise InputError(f"{path}: empty file, no header row")
    header = [h.strip() for h in table[0]]
    if len(set(header)) != len(header):
        raise InputError(f"{path}: duplicate column names")
    raw_rows = table[1:]
    for i, row in enumerate(raw_rows):
        if len(row) != len(header):
            raise InputError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")

    if schema_file is not None:
        schema = schema_file if isinstance(schema_file, Schema) else load_schema(schema_file)
        try:
            order = [schema.index_of(h) for h in header]
        except KeyError as exc:
            raise InputError(f"{path}: column {exc.args[0]!r} not in schema") from exc
        if sorted(order) != list(range(schema.n)):
            raise InputError(f"{path}: columns do not cover the schema's variables")
        lookup = [
            {s: i for i, s in enumerate(schema.variables[v].states)} for v in range(schema.n)
        ]
        rows = np.zeros((len(raw_rows), schema.n), dtype=np.int64)
        for r, row in enumerate(raw_rows):
            for col, cell in enumerate(row):
                v = order[col]
                label = cell.strip()
                if label == "":
                    raise InputError(f"{path}: missing value at row {r + 2}, column {header[col]!r}")
                try:
                    rows[r, v] = lookup[v][label]
                except KeyError:
                    raise InputError(
                        f"{path}: label {label!r} for {header[col]!r} not in schema"
                    ) from None
        return DataTable(schema, rows)

    if not raw_rows:
        raise InputError(f"{path}: no data rows and no schema file to pin arities")
    n = len(header)
    label_maps: list[dict[str, int]] = [{} for _ in range(n)]
    rows = np.zeros((len(raw_rows), n), dtype=np.int64)
    for r, row in enumerate(raw_rows):
        for c, cell in enumerate(row):
            label = cell.strip()
            if label == "":
                raise InputError(f"{path}: missing value at row {r + 2}, column {header[c]!r}")
            rows[r, c] = label_maps[c].setdefault(label, len(label_maps[c]))
    variables = []
    for c in range(n):
        states = tuple(sorted(label_maps[c], key=label_maps[c].get))
        if len(states) < 2:
            raise InputError(
                f"{path}: column {header[c]!r} has {len(states)} distinct value(s); arity must be >= 2"
            )
        variables.append(Variable(header[c], states))
    return DataTable(Schema(tuple(variables)), rows)


def write_csv(data: DataTable, path, *, delimiter: str = ",") -> None:
    """Write a DataTable back out as a labeled CSV (the dialect load_csv ingests)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(data.schema.names())
        states = [v.states for v in data.schema.variables]
        for row in data.rows:
            writer.writerow([states[i][int(x)] for i, x in enumerate(row)])
