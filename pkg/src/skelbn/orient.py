"""Score-guided edge orientation over a fixed skeleton.

The operator drops every orientation in a DAG and rebuilds them in three
stages, never adding or removing an edge:

1. ``orient_colliders``: greedily fix the collider (v-structure) whose
   acceptance score clears the threshold ``gamma``, re-fixing any edge that
   a fixed directed path forces (cycle prevention), until no candidate
   clears the threshold.
2. ``fix_orientations``: propagate directions so no avoidable collider
   appears (``propose_orientations``), fix uniquely proposed edges, and
   resolve ambiguous runs by inserting the least-damaging extra collider.
3. ``complete_orientation``: orient whatever stays reversible (randomly or
   canonically), re-propagating after each choice.

Collider candidates are scored by the minimum score advantage of the
collider DAG over the three one-center alternatives with the same other
parents; a positive value lower-bounds the total-score gain of choosing the
collider. Parent sets inside these scores are always the sources of
currently fixed incoming edges, excluding the candidate pair itself.

Candidate scoring within one loop pass is pure given the pdag snapshot and
may run in parallel; mark mutation is strictly sequential.
"""
from __future__ import annotations

from .dataset import DataTable
from .errors import InternalBoundError
from .graph import Dag, EdgeMark, Pdag, extract_dag, to_skeleton
from .scores import ScoreCache, ScoreConfig, edge_gain
from .util import as_rng

COMPLETION_POLICIES = ("random", "deterministic")

_INTO = (EdgeMark.FIXED_FWD, EdgeMark.PROPOSED_FWD, EdgeMark.AMBIGUOUS)
_ALL_KINDS = ("fixed", "proposed", "ambiguous")


def _emit(trace, kind: str, detail: str) -> None:
    if trace is not None:
        trace(f"{kind} {detail}")


def collider_alternative_scores(data, config, pdag: Pdag, a: int, b: int, c: int, cache=None) -> tuple[float, float, float]:
    """Score advantages of the collider a -> b <- c over its three alternatives.

    Returns (vs chain a <- b <- c, vs chain a -> b -> c, vs fork a <- b -> c).
    The alternatives re-orient only the two candidate edges; everything else,
    including the fixed parents of a, b, and c, is held identical. Swapping
    the endpoint roles swaps the two chain scores exactly.
    """
    if len({a, b, c}) != 3:
        raise ValueError("collider candidate needs three distinct nodes")
    if not (pdag.has_edge(a, b) and pdag.has_edge(b, c)) or pdag.has_edge(a, c):
        raise ValueError(f"({a},{b},{c}) is not an unshielded path")
    pa_a = pdag.fixed_parents(a) - {b}
    pa_b = pdag.fixed_parents(b) - {a, c}
    pa_c = pdag.fixed_parents(c) - {b}
    g_chain_rev = edge_gain(data, config, a, b, pa_b | {c}, cache) - edge_gain(
        data, config, b, a, pa_a, cache
    )
    g_chain_fwd = edge_gain(data, config, c, b, pa_b | {a}, cache) - edge_gain(
        data, config, b, c, pa_c, cache
    )
    g_fork = (
        g_chain_rev
        + edge_gain(data, config, c, b, pa_b, cache)
        - edge_gain(data, config, b, c, pa_c, cache)
    )
    return g_chain_rev, g_chain_fwd, g_fork


def collider_score(data, config, pdag: Pdag, a: int, b: int, c: int, cache=None) -> float:
    """Minimum score advantage of the collider a -> b <- c over its alternatives.

    Positive values lower-bound the total-score gain of choosing the collider
    over any alternative orientation of the same two edges. Endpoints are
    canonicalized so the score is exactly symmetric in (a, c).
    """
    if a > c:
        a, c = c, a
    return min(collider_alternative_scores(data, config, pdag, a, b, c, cache))


def _candidate_triples(pdag: Pdag):
    """Unshielded triples (a, b, c), a < c, whose marks still admit the collider.

    Each edge must be undirected or already fixed toward the center, and at
    least one of the two must still be undirected (otherwise the collider
    already exists).
    """
    ok = (EdgeMark.UNDIRECTED, EdgeMark.FIXED_FWD)
    out = []
    for b in range(pdag.n):
        nbrs = sorted(pdag.neighbors(b))
        for i, a in enumerate(nbrs):
            m_ab = pdag.mark_from(a, b)
            if m_ab not in ok:
                continue
            for c in nbrs[i + 1 :]:
                if pdag.has_edge(a, c):
                    continue
                m_cb = pdag.mark_from(c, b)
                if m_cb not in ok:
                    continue
                if m_ab is EdgeMark.FIXED_FWD and m_cb is EdgeMark.FIXED_FWD:
                    continue
                out.append((a, b, c))
    return out


def _fix_forced_edges(pdag: Pdag, trace=None) -> None:
    """Cycle prevention: fix any non-fixed edge along an existing fixed path.

    While some edge x--y has a fixed directed path x ~> y (length >= 2), the
    edge itself is fixed x -> y; the opposite orientation would close a
    cycle. Runs to a fixpoint.
    """
    changed = True
    while changed:
        changed = False
        for x, y in pdag.edges():
            if pdag.mark(x, y) in (EdgeMark.FIXED_FWD, EdgeMark.FIXED_BWD):
                continue
            if pdag.directed_path_exists(x, y, kinds=("fixed",)):
                pdag.set_fixed(x, y)
                _emit(trace, "cycle-prevent", f"{x}=>{y}")
                changed = True
            elif pdag.directed_path_exists(y, x, kinds=("fixed",)):
                pdag.set_fixed(y, x)
                _emit(trace, "cycle-prevent", f"{y}=>{x}")
                changed = True


def orient_colliders(data: DataTable, config: ScoreConfig, pdag: Pdag, cache: ScoreCache | None = None, trace=None) -> Pdag:
    """Greedily fix the best-scoring collider while one clears gamma.

    Candidate scores are recomputed each pass (the family cache makes the
    repeats cheap), and forced-edge closure runs after every orientation so
    the fixed subgraph can never acquire a cycle. Ties break on the
    lexicographically smallest (center, low endpoint, high endpoint).
    """
    while True:
        best = None
        best_score = -float("inf")
        for a, b, c in sorted(_candidate_triples(pdag), key=lambda t: (t[1], t[0], t[2])):
            g = collider_score(data, config, pdag, a, b, c, cache)
            if g >= config.gamma and g > best_score:
                best = (a, b, c)
                best_score = g
        if best is None:
            return pdag
        a, b, c = best
        if pdag.mark_from(a, b) is not EdgeMark.FIXED_FWD:
            pdag.set_fixed(a, b)
        if pdag.mark_from(c, b) is not EdgeMark.FIXED_FWD:
            pdag.set_fixed(c, b)
        _emit(trace, "collider", f"{a}=>{b}<={c} score={best_score:.6g}")
        _fix_forced_edges(pdag, trace)


def propose_orientations(pdag: Pdag, trace=None) -> Pdag:
    """Propose directions for non-fixed edges so no avoidable collider appears.

    Rule 1: if some edge points into b (fixed, proposed, or ambiguous) and b
    has an unshielded neighbor c, the b--c edge is proposed away from b; a
    conflicting proposal toward b becomes ambiguous. Rule 2: a proposed edge
    whose reverse closes a directed path (over fixed, proposed, or ambiguous
    marks) becomes ambiguous. Iterates both rules to a fixpoint; marks only
    ever move up undirected -> proposed -> ambiguous, so the fixpoint does
    not depend on scan order.
    """
    changed = True
    while changed:
        changed = False
        for b in range(pdag.n):
            nbrs = sorted(pdag.neighbors(b))
            for a in nbrs:
                if pdag.mark_from(a, b) not in _INTO:
                    continue
                for c in nbrs:
                    if c == a or pdag.has_edge(a, c):
                        continue
                    m = pdag.mark_from(b, c)
                    if m is EdgeMark.UNDIRECTED:
                        pdag.set_proposed(b, c)
                        _emit(trace, "propose", f"{b}->{c}")
                        changed = True
                    elif m is EdgeMark.PROPOSED_BWD:
                        pdag.set_ambiguous(b, c)
                        _emit(trace, "propose", f"{b}<->{c} (conflict)")
                        changed = True
        for x, y in pdag.proposed_edges():
            m = pdag.mark(x, y)
            p, q = (x, y) if m is EdgeMark.PROPOSED_FWD else (y, x)
            if pdag.directed_path_exists(q, p, kinds=_ALL_KINDS):
                pdag.set_ambiguous(p, q)
                _emit(trace, "propose", f"{p}<->{q} (cycle risk)")
                changed = True
    return pdag


def _ambiguous_collider_pairs(pdag: Pdag):
    """Unshielded triples (a, b, c), a < c, with both edges marked ambiguous."""
    out = []
    for b in range(pdag.n):
        amb = sorted(
            u for u in pdag.neighbors(b) if pdag.mark_from(u, b) is EdgeMark.AMBIGUOUS
        )
        for i, a in enumerate(amb):
            for c in amb[i + 1 :]:
                if not pdag.has_edge(a, c):
                    out.append((a, b, c))
    return out


def fix_orientations(data: DataTable, config: ScoreConfig, pdag: Pdag, cache: ScoreCache | None = None, trace=None) -> Pdag:
    """Resolve proposals and ambiguities until only undirected and fixed marks remain.

    Each pass proposes orientations, fixes every uniquely proposed edge
    (running forced-edge closure after each fix), and, if ambiguous edges
    survive, inserts the ambiguous-pair collider with the highest score --
    which may be negative: the least score loss wins. Remaining ambiguous
    marks are reset to undirected and the pass repeats. A pass that finds
    ambiguous edges but no ambiguous pair fixes the lowest such edge in its
    better-scoring direction so the loop cannot live-lock.
    """
    cap = 10 * max(1, len(pdag.edges()))
    _fix_forced_edges(pdag, trace)
    for _ in range(cap):
        propose_orientations(pdag, trace)
        for x, y in pdag.edges():
            m = pdag.mark(x, y)
            if m is EdgeMark.PROPOSED_FWD:
                pdag.set_fixed(x, y)
                _emit(trace, "fix", f"{x}=>{y}")
                _fix_forced_edges(pdag, trace)
            elif m is EdgeMark.PROPOSED_BWD:
                pdag.set_fixed(y, x)
                _emit(trace, "fix", f"{y}=>{x}")
                _fix_forced_edges(pdag, trace)
        ambiguous = pdag.ambiguous_edges()
        if not ambiguous:
            return pdag
        pairs = _ambiguous_collider_pairs(pdag)
        if pairs:
            best = None
            best_score = -float("inf")
            for a, b, c in sorted(pairs, key=lambda t: (t[1], t[0], t[2])):
                g = collider_score(data, config, pdag, a, b, c, cache)
                if g > best_score:
                    best = (a, b, c)
                    best_score = g
            a, b, c = best
            pdag.set_fixed(a, b)
            pdag.set_fixed(c, b)
            _emit(trace, "ambiguous-collider", f"{a}=>{b}<={c} score={best_score:.6g}")
            _fix_forced_edges(pdag, trace)
        else:
            x, y = ambiguous[0]
            g_xy = edge_gain(data, config, x, y, pdag.fixed_parents(y) - {x}, cache)
            g_yx = edge_gain(data, config, y, x, pdag.fixed_parents(x) - {y}, cache)
            p, q = (x, y) if g_xy >= g_yx else (y, x)
            pdag.set_fixed(p, q)
            _emit(trace, "fix", f"{p}=>{q} (lone ambiguous, gain={max(g_xy, g_yx):.6g})")
            _fix_forced_edges(pdag, trace)
        for x, y in pdag.ambiguous_edges():
            pdag.set_undirected(x, y)
    raise InternalBoundError(
        f"fix_orientations exceeded {cap} passes without resolving all marks"
    )


def complete_orientation(data: DataTable, config: ScoreConfig, pdag: Pdag, cache: ScoreCache | None = None, rng=None, policy: str = "random", trace=None) -> Dag:
    """Orient the remaining reversible edges and extract the DAG.

    Under the random policy an undirected edge and a direction are drawn
    uniformly; the deterministic policy takes the lowest canonical pair,
    low -> high. A direction that would close a fixed cycle is never taken
    (after forced-edge closure both directions are safe, so this is a
    guard, not a chooser). Each choice is followed by a full
    ``fix_orientations`` pass to propagate its consequences.
    """
    if policy not in COMPLETION_POLICIES:
        raise ValueError(f"policy must be one of {COMPLETION_POLICIES}")
    gen = as_rng(rng)
    while True:
        undirected = pdag.undirected_edges()
        if not undirected:
            return extract_dag(pdag)
        if policy == "random":
            x, y = undirected[int(gen.integers(len(undirected)))]
            if gen.integers(2):
                x, y = y, x
        else:
            x, y = undirected[0]
        if pdag.directed_path_exists(y, x, kinds=("fixed",)):
            x, y = y, x
        pdag.set_fixed(x, y)
        _emit(trace, "random-completion", f"{x}=>{y}")
        _fix_forced_edges(pdag, trace)
        fix_orientations(data, config, pdag, cache, trace)


def reorient(data: DataTable, config: ScoreConfig, dag: Dag, cache: ScoreCache | None = None, rng=None, policy: str = "random", trace=None) -> Dag:
    """Re-derive every edge orientation of a DAG from its skeleton.

    The returned DAG has exactly the input's skeleton; orientations are
    rebuilt from scratch by collider placement, propagation, and completion.
    With the deterministic policy this is a pure function of (data, config,
    skeleton).
    """
    pdag = Pdag.from_skeleton(to_skeleton(dag))
    orient_colliders(data, config, pdag, cache, trace)
    fix_orientations(data, config, pdag, cache, trace)
    return complete_orientation(data, config, pdag, cache, rng=rng, policy=policy, trace=trace)
