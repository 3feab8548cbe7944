"""Search strategies over DAG space.

``skeleton_search`` is the three-step cycle: re-derive all orientations
from the current skeleton, include at most one edge whose gain clears the
edge threshold, then eliminate edges that no longer clear it. Because the
reorientation step can change several edges at once, the loop may oscillate
among a few DAGs instead of converging; a window of recent DAGs detects the
recurrence and the best-scoring DAG in the window is returned.

``local_search`` (hill climbing over add/delete/reverse), ``k2_search``
(greedy parent selection under a fixed node ordering), and
``exhaustive_search`` (full enumeration, small n only) serve as baselines
and oracles.

Move evaluation within a step is pure and could run in parallel; the
accept-move loops are sequential. Independent searches need separate
caches.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .dataset import DataTable
from .graph import Dag, would_create_cycle
from .orient import reorient
from .scores import ScoreCache, ScoreConfig, edge_gain, total_score
from .util import as_rng

STRATEGIES = ("skeleton", "local", "k2")


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "skeleton"
    history_window: int = 10
    max_iterations: int = 200
    ordering: tuple[int, ...] | None = None
    max_parents: int | None = None
    completion: str = "random"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.history_window < 2:
            raise ValueError("history_window must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.ordering is not None:
            object.__setattr__(self, "ordering", tuple(int(i) for i in self.ordering))


@dataclass
class SearchResult:
    dag: Dag
    score: float
    iterations: int
    history: list[tuple[int, float, int]] = field(default_factory=list)
    oscillation_detected: bool = False
    hit_max_iterations: bool = False
    events: list[dict] = field(default_factory=list)


def forward_step(data: DataTable, config: ScoreConfig, dag: Dag, cache: ScoreCache | None = None):
    """Best single acyclic edge addition, or None if no gain clears the threshold.

    All ordered non-adjacent pairs are scored; ties break on the smallest
    (child, parent).
    """
    best = None
    best_gain = -float("inf")
    for b in range(dag.n):
        for a in range(dag.n):
            if a == b or dag.adjacent(a, b) or would_create_cycle(dag, a, b):
                continue
            g = edge_gain(data, config, a, b, dag.parents[b], cache)
            if g >= config.edge_threshold and g > best_gain:
                best = (a, b)
                best_gain = g
    if best is None:
        return None
    a, b = best
    return dag.add_edge(a, b), best_gain


def backward_elimination(data: DataTable, config: ScoreConfig, dag: Dag, cache: ScoreCache | None = None) -> Dag:
    """Repeatedly drop the weakest edge until every survivor clears the threshold."""
    while True:
        worst = None
        worst_gain = float("inf")
        for a, b in dag.edges():
            g = edge_gain(data, config, a, b, dag.parents[b] - {a}, cache)
            if g < worst_gain:
                worst = (a, b)
                worst_gain = g
        if worst is None or worst_gain >= config.edge_threshold:
            return dag
        dag = dag.remove_edge(*worst)


def skeleton_search(data: DataTable, config: ScoreConfig, search_config: SearchConfig | None = None, rng=None, cache: ScoreCache | None = None, trace=None) -> SearchResult:
    """Reorient / include-one / eliminate cycle from the empty DAG.

    Stops when a cycle neither adds nor removes an edge, when the end-of-cycle
    DAG structurally recurs within the recent-DAG window (oscillation), or at
    ``max_iterations``. Returns the highest-scoring DAG in the window.
    """
    sc = search_config or SearchConfig()
    cache = cache if cache is not None else ScoreCache()
    gen = as_rng(rng)
    dag = Dag.empty(data.schema.n)
    window: list[tuple[Dag, float]] = []
    result = SearchResult(dag=dag, score=total_score(data, config, dag, cache), iterations=0)
    for iteration in range(1, sc.max_iterations + 1):
        dag = reorient(data, config, dag, cache, rng=gen, policy=sc.completion, trace=trace)
        step = forward_step(data, config, dag, cache)
        added = None
        if step is not None:
            before = set(dag.edges())
            dag = step[0]
            added = next(iter(set(dag.edges()) - before))
        kept = backward_elimination(data, config, dag, cache)
        removed = sorted(set(dag.edges()) - set(kept.edges()))
        dag = kept
        score = total_score(data, config, dag, cache)
        result.history.append((iteration, score, dag.edge_count))
        result.events.append(
            {
                "iteration": iteration,
                "score": score,
                "edge_count": dag.edge_count,
                "added": added,
                "removed": removed,
                "edges": dag.edges(),
            }
        )
        recurred = any(dag == d for d, _ in window)
        window.append((dag, score))
        del window[: -sc.history_window]
        converged = added is None and not removed
        result.iterations = iteration
        if converged or recurred:
            result.oscillation_detected = recurred and not converged
            break
    else:
        result.iterations = sc.max_iterations
        result.hit_max_iterations = True
    best_dag, best_score = window[0]
    for d, s in window[1:]:
        if s > best_score:
            best_dag, best_score = d, s
    result.dag = best_dag
    result.score = best_score
    return result


def local_search(data: DataTable, config: ScoreConfig, search_config: SearchConfig | None = None, cache: ScoreCache | None = None) -> SearchResult:
    """Hill climbing over single-edge additions, deletions, and reversals.

    Additions must clear the edge threshold; a deletion is available when
    the edge's gain has dropped below it; reversals only need acyclicity.
    The best strictly improving move is taken until none exists.
    """
    sc = search_config or SearchConfig(strategy="local")
    cache = cache if cache is not None else ScoreCache()
    dag = Dag.empty(data.schema.n)
    score = total_score(data, config, dag, cache)
    result = SearchResult(dag=dag, score=score, iterations=0)
    for iteration in range(1, sc.max_iterations + 1):
        best_move = None
        best_gain = 0.0
        for b in range(dag.n):
            for a in range(dag.n):
                if a == b:
                    continue
                if dag.has_edge(a, b):
                    g_edge = edge_gain(data, config, a, b, dag.parents[b] - {a}, cache)
                    if g_edge < config.edge_threshold and -g_edge > best_gain:
                        best_move = ("delete", a, b)
                        best_gain = -g_edge
                    reduced = dag.remove_edge(a, b)
                    if not would_create_cycle(reduced, b, a):
                        g_rev = -g_edge + edge_gain(data, config, b, a, reduced.parents[a], cache)
                        if g_rev > best_gain:
                            best_move = ("reverse", a, b)
                            best_gain = g_rev
                elif not dag.adjacent(a, b) and not would_create_cycle(dag, a, b):
                    g_add = edge_gain(data, config, a, b, dag.parents[b], cache)
                    if g_add >= config.edge_threshold and g_add > best_gain:
                        best_move = ("add", a, b)
                        best_gain = g_add
        if best_move is None:
            break
        kind, a, b = best_move
        if kind == "add":
            dag = dag.add_edge(a, b)
        elif kind == "delete":
            dag = dag.remove_edge(a, b)
        else:
            dag = dag.reverse_edge(a, b)
        score = total_score(data, config, dag, cache)
        result.iterations = iteration
        result.history.append((iteration, score, dag.edge_count))
        result.events.append(
            {"iteration": iteration, "score": score, "edge_count": dag.edge_count,
             "move": kind, "edge": (a, b), "edges": dag.edges()}
        )
    else:
        result.hit_max_iterations = True
    result.dag = dag
    result.score = total_score(data, config, dag, cache)
    return result


def k2_search(data: DataTable, config: ScoreConfig, search_config: SearchConfig, cache: ScoreCache | None = None) -> SearchResult:
    """Greedy parent selection under a fixed node ordering.

    For each node in order, repeatedly add the predecessor with the largest
    gain while it clears the edge threshold and the parent cap allows.
    """
    ordering = search_config.ordering
    if ordering is None or sorted(ordering) != list(range(data.schema.n)):
        raise ValueError("k2 needs an ordering that is a permutation of all variables")
    cache = cache if cache is not None else ScoreCache()
    dag = Dag.empty(data.schema.n)
    result = SearchResult(dag=dag, score=0.0, iterations=0)
    step = 0
    for pos, b in enumerate(ordering):
        while search_config.max_parents is None or len(dag.parents[b]) < search_config.max_parents:
            best = None
            best_gain = -float("inf")
            for a in sorted(ordering[:pos]):
                if a in dag.parents[b]:
                    continue
                g = edge_gain(data, config, a, b, dag.parents[b], cache)
                if g > best_gain:
                    best = a
                    best_gain = g
            if best is None or best_gain < config.edge_threshold:
                break
            dag = dag.add_edge(best, b)
            step += 1
            result.history.append((step, total_score(data, config, dag, cache), dag.edge_count))
    result.dag = dag
    result.score = total_score(data, config, dag, cache)
    result.iterations = step
    return result


def enumerate_dags(n: int):
    """Yield every labeled DAG on n nodes (3^(n(n-1)/2) pair states, filtered)."""
    pairs = list(combinations(range(n), 2))
    for choice in product((0, 1, 2), repeat=len(pairs)):
        parents = [set() for _ in range(n)]
        for (i, j), state in zip(pairs, choice):
            if state == 1:
                parents[j].add(i)
            elif state == 2:
                parents[i].add(j)
        dag = _try_dag(n, parents)
        if dag is not None:
            yield dag


def _try_dag(n: int, parents) -> Dag | None:
    try:
        return Dag(n, tuple(frozenset(p) for p in parents))
    except ValueError:
        return None


def exhaustive_search(data: DataTable, config: ScoreConfig, n_limit: int = 5, cache: ScoreCache | None = None) -> SearchResult:
    """Global optimum by enumerating every DAG; refuses more than n_limit nodes."""
    n = data.schema.n
    if n > n_limit:
        raise ValueError(f"exhaustive search limited to {n_limit} nodes, got {n}")
    cache = cache if cache is not None else ScoreCache()
    best_dag = None
    best_score = -float("inf")
    count = 0
    for dag in enumerate_dags(n):
        count += 1
        s = total_score(data, config, dag, cache)
        if s > best_score:
            best_dag = dag
            best_score = s
    return SearchResult(dag=best_dag, score=best_score, iterations=count)


def run_search(data: DataTable, config: ScoreConfig, search_config: SearchConfig, rng=None, cache: ScoreCache | None = None, trace=None) -> SearchResult:
    """Dispatch on the configured strategy."""
    if search_config.strategy == "skeleton":
        return skeleton_search(data, config, search_config, rng=rng, cache=cache, trace=trace)
    if search_config.strategy == "local":
        return local_search(data, config, search_config, cache=cache)
    return k2_search(data, config, search_config, cache=cache)
