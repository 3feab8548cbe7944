import numpy as np
import pytest

import skelbn as sb
from skelbn import Dag, EdgeMark, Pdag
from skelbn.search import enumerate_dags


def fig1_dags():
    """Four DAGs on the chain-plus-fork skeleton: three equivalent, one collider."""
    # nodes a,b,c,d,e,f = 0..5; skeleton a-c, b-c, c-d, d-e, e-f
    d1 = Dag.from_edges(6, [(1, 2), (2, 0), (2, 3), (3, 4), (4, 5)])
    d2 = Dag.from_edges(6, [(0, 2), (2, 1), (2, 3), (3, 4), (4, 5)])
    d3 = Dag.from_edges(6, [(5, 4), (4, 3), (3, 2), (2, 0), (2, 1)])
    d4 = Dag.from_edges(6, [(0, 2), (1, 2), (2, 3), (3, 4), (4, 5)])
    return d1, d2, d3, d4


class TestSkeleton:
    def test_chain(self):
        dag = Dag.from_edges(3, [(0, 1), (1, 2)])
        assert sb.to_skeleton(dag).edges == frozenset({(0, 1), (1, 2)})

    def test_empty(self):
        assert sb.to_skeleton(Dag.empty(4)).edges == frozenset()

    def test_shared_across_orientations(self):
        d1, d2, d3, d4 = fig1_dags()
        skels = {sb.to_skeleton(d) for d in (d1, d2, d3, d4)}
        assert len(skels) == 1


class TestWouldCreateCycle:
    def test_chain_back_edge(self):
        dag = Dag.from_edges(3, [(0, 1), (1, 2)])
        assert sb.would_create_cycle(dag, 2, 0)
        assert not sb.would_create_cycle(dag, 0, 2)

    def test_exhaustive_against_construction(self):
        # adding a non-cycle edge must keep the dag constructible, and vice versa
        for dag in enumerate_dags(4):
            for a in range(4):
                for b in range(4):
                    if a == b or dag.has_edge(a, b):
                        continue
                    predicted = sb.would_create_cycle(dag, a, b)
                    try:
                        dag.add_edge(a, b)
                        actual = False
                    except ValueError:
                        actual = True
                    assert predicted == actual


class TestSignature:
    def test_collider(self):
        dag = Dag.from_edges(3, [(0, 1), (2, 1)])
        assert sb.signature(dag).colliders == frozenset({(0, 1, 2)})

    def test_shielded_collider_excluded(self):
        dag = Dag.from_edges(3, [(0, 1), (2, 1), (0, 2)])
        assert sb.signature(dag).colliders == frozenset()

    def test_equivalent_dags_share_signature(self):
        d1, d2, d3, d4 = fig1_dags()
        assert sb.signature(d1) == sb.signature(d2) == sb.signature(d3)
        assert sb.signature(d4) != sb.signature(d1)
        assert sb.signature(d4).colliders == frozenset({(0, 2, 1)})


class TestPdag:
    def test_marks_are_direction_relative(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(3, frozenset({(0, 1), (1, 2)})))
        pdag.set_fixed(1, 0)
        assert pdag.mark(0, 1) is EdgeMark.FIXED_BWD
        assert pdag.mark_from(1, 0) is EdgeMark.FIXED_FWD
        assert pdag.fixed_parents(0) == frozenset({1})

    def test_fixed_path_query_needs_two_edges(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(3, frozenset({(0, 1), (1, 2)})))
        pdag.set_fixed(0, 1)
        pdag.set_fixed(1, 2)
        assert pdag.directed_path_exists(0, 2, kinds=("fixed",))
        # the direct edge alone is not a path
        assert not pdag.directed_path_exists(0, 1, kinds=("fixed",))

    def test_ambiguous_counts_both_ways(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(3, frozenset({(0, 1), (1, 2)})))
        pdag.set_proposed(0, 1)
        pdag.set_ambiguous(1, 2)
        assert pdag.directed_path_exists(0, 2, kinds=("fixed", "proposed", "ambiguous"))
        assert pdag.directed_path_exists(2, 0, kinds=("fixed", "proposed", "ambiguous")) is False

    def test_fixed_cycle_refused(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(3, frozenset({(0, 1), (1, 2), (0, 2)})))
        pdag.set_fixed(0, 1)
        pdag.set_fixed(1, 2)
        with pytest.raises(AssertionError):
            pdag.set_fixed(2, 0)

    def test_flipping_fixed_refused(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(2, frozenset({(0, 1)})))
        pdag.set_fixed(0, 1)
        with pytest.raises(ValueError):
            pdag.set_fixed(1, 0)


class TestExtractDag:
    def test_round_trip(self):
        dag = Dag.from_edges(4, [(0, 1), (1, 2), (0, 3)])
        pdag = Pdag.from_skeleton(sb.to_skeleton(dag))
        for p, c in dag.edges():
            pdag.set_fixed(p, c)
        assert sb.extract_dag(pdag) == dag

    def test_non_fixed_mark_rejected(self):
        pdag = Pdag.from_skeleton(sb.Skeleton(3, frozenset({(0, 1), (1, 2)})))
        pdag.set_fixed(0, 1)
        with pytest.raises(ValueError, match="non-fixed"):
            sb.extract_dag(pdag)


class TestRandomDag:
    def test_extremes(self):
        assert sb.random_dag(5, 0.0, rng=0).edge_count == 0
        assert sb.random_dag(5, 1.0, rng=0).edge_count == 10

    def test_always_acyclic_and_seeded(self):
        for seed in range(1000):
            dag = sb.random_dag(6, 0.5, rng=seed)  # constructor rejects cycles
            dag.topological_order()
        a = sb.random_dag(8, 0.4, rng=123)
        b = sb.random_dag(8, 0.4, rng=123)
        assert a == b


def test_exports(tmp_path):
    schema = sb.Schema.from_arities([("x", 2), ("y", 2), ("z", 2)])
    dag = Dag.from_edges(3, [(0, 1), (1, 2)])
    text = sb.to_edge_list_text(dag, schema)
    assert text == "x -> y\ny -> z\n"
    dot = sb.to_dot(dag, schema)
    assert '"x" -> "y";' in dot and dot.startswith("digraph")


def test_structural_errors():
    truth = Dag.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    learned = Dag.from_edges(4, [(0, 1), (2, 1), (0, 3)])
    errs = sb.structural_errors(learned, truth)
    assert errs == {"missing": 1, "extra": 1, "misoriented": 1}
