import numpy as np
import pytest

import skelbn as sb


@pytest.fixture
def copy_pair_data():
    """Two binary variables, perfectly copied, 4+4 rows (N=8)."""
    schema = sb.Schema.from_arities([("a", 2), ("b", 2)])
    rows = np.array([[0, 0]] * 4 + [[1, 1]] * 4)
    return sb.DataTable(schema, rows)


def make_independent_data(n_vars, n_rows, seed, arity=2):
    rng = np.random.default_rng(seed)
    schema = sb.Schema.from_arities([(f"v{i}", arity) for i in range(n_vars)])
    rows = rng.integers(0, arity, size=(n_rows, n_vars))
    return sb.DataTable(schema, rows)
