from math import comb

import numpy as np
import pytest

import skelbn as sb
from skelbn import Dag, ScoreCache, ScoreConfig, SearchConfig

from conftest import make_independent_data

CFG = ScoreConfig()  # bic, edge_threshold=3


def collider_data(n_rows=5000, seed=0):
    """Three binary variables, true structure a->b<-c with strong dependence."""
    schema = sb.Schema.from_arities([("a", 2), ("b", 2), ("c", 2)])
    dag = Dag.from_edges(3, [(0, 1), (2, 1)])
    p_b = np.array([[0.9, 0.1], [0.5, 0.5], [0.4, 0.6], [0.05, 0.95]])
    net = sb.BayesNet(schema, dag, (
        sb.Cpt(0, (), np.array([[0.5, 0.5]])),
        sb.Cpt(1, (0, 2), p_b),
        sb.Cpt(2, (), np.array([[0.5, 0.5]])),
    ))
    return sb.sample(net, n_rows, rng=np.random.default_rng(seed)), dag


def chain_data(n_rows=5000, seed=0):
    schema = sb.Schema.from_arities([("a", 2), ("b", 2), ("c", 2)])
    dag = Dag.from_edges(3, [(0, 1), (1, 2)])
    copy = np.array([[0.85, 0.15], [0.15, 0.85]])
    net = sb.BayesNet(schema, dag, (
        sb.Cpt(0, (), np.array([[0.5, 0.5]])),
        sb.Cpt(1, (0,), copy),
        sb.Cpt(2, (1,), copy),
    ))
    return sb.sample(net, n_rows, rng=np.random.default_rng(seed)), dag


def dag_count(n):
    """Labeled-DAG counting recurrence, independent of the enumerator."""
    a = [1]
    for m in range(1, n + 1):
        total = 0
        for k in range(1, m + 1):
            total += (-1) ** (k + 1) * comb(m, k) * 2 ** (k * (m - k)) * a[m - k]
        a.append(total)
    return a[n]


class TestForwardStep:
    def test_complete_dag_returns_none(self, copy_pair_data):
        full = Dag.from_edges(2, [(0, 1)])
        assert sb.forward_step(copy_pair_data, CFG, full) is None

    def test_copy_pair_edge_added(self, copy_pair_data):
        # gain 4.5055 >= threshold 3
        step = sb.forward_step(copy_pair_data, CFG, Dag.empty(2))
        assert step is not None
        dag, gain = step
        assert dag.edge_count == 1
        assert gain == pytest.approx(4.505456673639644, abs=1e-9)

    def test_independent_data_returns_none(self):
        data = make_independent_data(3, 2000, seed=5)
        assert sb.forward_step(data, CFG, Dag.empty(3)) is None

    def test_tie_breaks_on_lowest_child_parent(self):
        # perfectly symmetric copy data over three identical columns
        schema = sb.Schema.from_arities([("a", 2), ("b", 2), ("c", 2)])
        col = np.array([0, 1] * 50)
        data = sb.DataTable(schema, np.column_stack([col, col, col]))
        dag, _ = sb.forward_step(data, CFG, Dag.empty(3))
        assert dag.edges() == [(1, 0)]  # child 0, parent 1


class TestBackwardElimination:
    def test_empty_dag_noop(self, copy_pair_data):
        assert sb.backward_elimination(copy_pair_data, CFG, Dag.empty(2)) == Dag.empty(2)

    def test_spurious_edge_removed(self):
        data = make_independent_data(2, 2000, seed=6)
        out = sb.backward_elimination(data, CFG, Dag.from_edges(2, [(0, 1)]))
        assert out.edge_count == 0

    def test_survivors_clear_threshold(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            net = sb.random_network(4, 4, arity_range=(2, 3), rng=rng, concentration=0.4)
            data = sb.sample(net, 300, rng=rng)
            dag = sb.random_dag(4, 0.6, rng=rng)
            out = sb.backward_elimination(data, CFG, dag, ScoreCache())
            for a, b in out.edges():
                g = sb.edge_gain(data, CFG, a, b, out.parents[b] - {a})
                assert g >= CFG.edge_threshold


class TestSkeletonSearch:
    def test_independent_data_yields_empty_dag(self):
        data = make_independent_data(4, 2000, seed=9)
        result = sb.skeleton_search(data, CFG, SearchConfig(completion="deterministic"))
        assert result.dag == Dag.empty(4)

    def test_collider_recovered_and_globally_optimal(self):
        data, truth = collider_data()
        result = sb.skeleton_search(data, CFG, SearchConfig(completion="deterministic"),
                                    rng=np.random.default_rng(0))
        assert sb.signature(result.dag) == sb.signature(truth)
        best = sb.exhaustive_search(data, CFG, n_limit=3)
        assert result.score == pytest.approx(best.score, rel=1e-9)

    def test_returned_score_best_in_window(self):
        data, _ = collider_data(seed=3)
        sc = SearchConfig(completion="deterministic", history_window=10)
        result = sb.skeleton_search(data, CFG, sc, rng=np.random.default_rng(1))
        window_scores = [s for _, s, _ in result.history[-sc.history_window:]]
        assert result.score >= max(window_scores) - 1e-12

    def test_reproducible_bit_for_bit(self):
        data, _ = collider_data(n_rows=800, seed=4)
        sc = SearchConfig(completion="deterministic")
        r1 = sb.skeleton_search(data, CFG, sc, rng=np.random.default_rng(5))
        r2 = sb.skeleton_search(data, CFG, sc, rng=np.random.default_rng(5))
        assert r1.dag == r2.dag and r1.score == r2.score and r1.history == r2.history

    def test_score_is_consistent_with_recompute(self):
        data, _ = chain_data(n_rows=1000, seed=5)
        result = sb.skeleton_search(data, CFG, SearchConfig(completion="random"),
                                    rng=np.random.default_rng(2))
        assert result.score == pytest.approx(
            sb.total_score(data, CFG, result.dag), rel=1e-9
        )


class TestLocalSearch:
    def test_independent_data_yields_empty_dag(self):
        data = make_independent_data(4, 2000, seed=10)
        assert sb.local_search(data, CFG).dag == Dag.empty(4)

    def test_copy_pair_matches_skeleton_search(self, copy_pair_data):
        lo = sb.local_search(copy_pair_data, CFG)
        sk = sb.skeleton_search(copy_pair_data, CFG, SearchConfig(completion="deterministic"))
        assert lo.dag.edge_count == 1
        assert lo.score == pytest.approx(sk.score, abs=1e-12)

    def test_score_strictly_increases(self):
        data, _ = collider_data(n_rows=3000, seed=7)
        result = sb.local_search(data, CFG)
        scores = [s for _, s, _ in result.history]
        assert all(b > a for a, b in zip(scores, scores[1:]))


class TestK2Search:
    def test_chain_recovered_with_true_ordering(self):
        data, truth = chain_data()
        result = sb.k2_search(data, CFG, SearchConfig(strategy="k2", ordering=(0, 1, 2)))
        assert result.dag == truth

    def test_reversed_ordering_never_beats_exhaustive(self):
        data, _ = chain_data(seed=8)
        best = sb.exhaustive_search(data, CFG, n_limit=3)
        rev = sb.k2_search(data, CFG, SearchConfig(strategy="k2", ordering=(2, 1, 0)))
        assert rev.score <= best.score + 1e-9

    def test_independent_data_yields_empty_dag(self):
        data = make_independent_data(4, 2000, seed=11)
        result = sb.k2_search(data, CFG, SearchConfig(strategy="k2", ordering=(0, 1, 2, 3)))
        assert result.dag == Dag.empty(4)

    def test_max_parents_respected(self):
        data, _ = collider_data()
        result = sb.k2_search(
            data, CFG, SearchConfig(strategy="k2", ordering=(0, 2, 1), max_parents=1)
        )
        assert all(len(p) <= 1 for p in result.dag.parents)

    def test_bad_ordering_rejected(self, copy_pair_data):
        with pytest.raises(ValueError):
            sb.k2_search(copy_pair_data, CFG, SearchConfig(strategy="k2", ordering=(0, 0)))


class TestExhaustiveSearch:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_enumeration_counts_match_recurrence(self, n):
        assert sum(1 for _ in sb.enumerate_dags(n)) == dag_count(n)

    def test_known_counts(self):
        assert dag_count(2) == 3 and dag_count(3) == 25 and dag_count(4) == 543

    def test_node_limit_enforced(self):
        data = make_independent_data(6, 10, seed=0)
        with pytest.raises(ValueError):
            sb.exhaustive_search(data, CFG, n_limit=5)

    def test_optimum_at_least_any_dag(self):
        data, truth = collider_data(n_rows=500, seed=2)
        best = sb.exhaustive_search(data, CFG, n_limit=3)
        assert best.iterations == 25
        assert best.score >= sb.total_score(data, CFG, truth) - 1e-12


def test_run_search_dispatch(copy_pair_data):
    for strategy, kwargs in [("skeleton", {}), ("local", {}), ("k2", {"ordering": (0, 1)})]:
        sc = SearchConfig(strategy=strategy, completion="deterministic", **kwargs)
        result = sb.run_search(copy_pair_data, CFG, sc, rng=np.random.default_rng(0))
        assert result.dag.edge_count == 1
