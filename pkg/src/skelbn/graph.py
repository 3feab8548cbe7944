"""DAGs, skeletons, and partially directed graphs with orientation marks.

A Pdag stores one mark per undirected edge; direction is encoded in the mark
relative to the canonical (low, high) pair. Six marks exist: undirected,
fixed in either direction, proposed in either direction, and ambiguous
(treated as pointing both ways by path queries). Orientation procedures
rewrite marks in place; the fixed subgraph must stay acyclic at all times.

Dag and Skeleton are immutable and hashable. A Pdag is single-writer: it is
mutated sequentially by the orientation procedures and must not be shared
mutably across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .dataset import Schema
from .util import as_rng


class EdgeMark(Enum):
    """Mark of a canonical (low, high) edge; FWD means low -> high."""

    UNDIRECTED = "und"
    FIXED_FWD = "fix_fwd"
    FIXED_BWD = "fix_bwd"
    PROPOSED_FWD = "prop_fwd"
    PROPOSED_BWD = "prop_bwd"
    AMBIGUOUS = "amb"


_FLIP = {
    EdgeMark.FIXED_FWD: EdgeMark.FIXED_BWD,
    EdgeMark.FIXED_BWD: EdgeMark.FIXED_FWD,
    EdgeMark.PROPOSED_FWD: EdgeMark.PROPOSED_BWD,
    EdgeMark.PROPOSED_BWD: EdgeMark.PROPOSED_FWD,
    EdgeMark.UNDIRECTED: EdgeMark.UNDIRECTED,
    EdgeMark.AMBIGUOUS: EdgeMark.AMBIGUOUS,
}

FIXED_MARKS = frozenset((EdgeMark.FIXED_FWD, EdgeMark.FIXED_BWD))


def _toposort(parents) -> list[int]:
    """Topological order (Kahn, lowest index first); raises on a cycle."""
    n = len(parents)
    remaining = [set(p) for p in parents]
    children = [set() for _ in range(n)]
    for child, ps in enumerate(parents):
        for p in ps:
            children[p].add(child)
    ready = sorted(i for i in range(n) if not remaining[i])
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        newly = []
        for ch in children[node]:
            remaining[ch].discard(node)
            if not remaining[ch]:
                newly.append(ch)
        ready = sorted(ready + newly)
    if len(order) != n:
        raise ValueError("graph contains a directed cycle")
    return order


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph as per-node parent sets."""

    n: int
    parents: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.parents) != self.n:
            raise ValueError("parents must have one entry per node")
        for child, ps in enumerate(self.parents):
            for p in ps:
                if not 0 <= p < self.n:
                    raise ValueError(f"parent index {p} out of range")
                if p == child:
                    raise ValueError(f"self-loop at node {child}")
        _toposort(self.parents)

    @classmethod
    def empty(cls, n: int) -> "Dag":
        return cls(n, tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Dag":
        parents = [set() for _ in range(n)]
        for a, b in edges:
            parents[b].add(a)
        return cls(n, tuple(frozenset(p) for p in parents))

    def has_edge(self, a: int, b: int) -> bool:
        return a in self.parents[b]

    def adjacent(self, a: int, b: int) -> bool:
        return a in self.parents[b] or b in self.parents[a]

    @property
    def edge_count(self) -> int:
        return sum(len(p) for p in self.parents)

    def edges(self) -> list[tuple[int, int]]:
        """Sorted (parent, child) pairs."""
        return sorted((p, c) for c in range(self.n) for p in self.parents[c])

    def add_edge(self, a: int, b: int) -> "Dag":
        ps = list(self.parents)
        ps[b] = ps[b] | {a}
        return Dag(self.n, tuple(ps))

    def remove_edge(self, a: int, b: int) -> "Dag":
        if a not in self.parents[b]:
            raise ValueError(f"edge {a}->{b} not present")
        ps = list(self.parents)
        ps[b] = ps[b] - {a}
        return Dag(self.n, tuple(ps))

    def reverse_edge(self, a: int, b: int) -> "Dag":
        return self.remove_edge(a, b).add_edge(b, a)

    def children_map(self) -> list[set[int]]:
        ch: list[set[int]] = [set() for _ in range(self.n)]
        for c in range(self.n):
            for p in self.parents[c]:
                ch[p].add(c)
        return ch

    def topological_order(self) -> list[int]:
        return _toposort(self.parents)


@dataclass(frozen=True)
class Skeleton:
    """Undirected edge set over n nodes; pairs stored canonically (low, high)."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < b < self.n):
                raise ValueError(f"edge ({a},{b}) not canonical or out of range")

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


@dataclass(frozen=True)
class EquivalenceSignature:
    """Skeleton plus collider triples (a, b, c), a < c: what a Markov class shares."""

    skeleton: Skeleton
    colliders: frozenset[tuple[int, int, int]]


def to_skeleton(dag: Dag) -> Skeleton:
    pairs = frozenset((min(p, c), max(p, c)) for c in range(dag.n) for p in dag.parents[c])
    return Skeleton(dag.n, pairs)


def would_create_cycle(dag: Dag, a: int, b: int) -> bool:
    """True iff adding a -> b creates a directed cycle (a directed path b ~> a exists)."""
    if a == b:
        raise ValueError("self-loop query")
    children = dag.children_map()
    stack = [b]
    seen = {b}
    while stack:
        node = stack.pop()
        if node == a:
            return True
        for ch in children[node]:
            if ch not in seen:
                seen.add(ch)
                stack.append(ch)
    return False


def signature(dag: Dag) -> EquivalenceSignature:
    colliders = set()
    for b in range(dag.n):
        for a, c in combinations(sorted(dag.parents[b]), 2):
            if not dag.adjacent(a, c):
                colliders.add((a, b, c))
    return EquivalenceSignature(to_skeleton(dag), frozenset(colliders))


class Pdag:
    """Partially directed graph over a fixed skeleton.

    The edge set never changes after construction; only marks do. Mutators
    assert that the fixed subgraph stays acyclic.
    """

    def __init__(self, n: int, marks: dict[tuple[int, int], EdgeMark]):
        self.n = n
        self._marks: dict[tuple[int, int], EdgeMark] = {}
        self._nbrs: list[set[int]] = [set() for _ in range(n)]
        for (a, b), mark in marks.items():
            if not (0 <= a < b < n):
                raise ValueError(f"edge ({a},{b}) not canonical or out of range")
            self._marks[(a, b)] = mark
            self._nbrs[a].add(b)
            self._nbrs[b].add(a)

    @classmethod
    def from_skeleton(cls, skeleton: Skeleton) -> "Pdag":
        return cls(skeleton.n, {e: EdgeMark.UNDIRECTED for e in skeleton.edges})

    def copy(self) -> "Pdag":
        return Pdag(self.n, dict(self._marks))

    # -- queries ------------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._marks)

    def has_edge(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self._marks

    def neighbors(self, v: int) -> set[int]:
        return self._nbrs[v]

    def mark(self, a: int, b: int) -> EdgeMark:
        """Raw mark of the canonical edge (a, b); requires a < b."""
        return self._marks[(a, b)]

    def mark_from(self, x: int, y: int) -> EdgeMark:
        """Mark of edge x--y as seen from x toward y (FWD means x -> y)."""
        a, b = min(x, y), max(x, y)
        m = self._marks[(a, b)]
        return m if x == a else _FLIP[m]

    def fixed_parents(self, v: int) -> frozenset[int]:
        """Sources of fixed edges pointing into v."""
        return frozenset(u for u in self._nbrs[v] if self.mark_from(u, v) is EdgeMark.FIXED_FWD)

    def edges_with_marks(self, kinds) -> list[tuple[int, int]]:
        return sorted(e for e, m in self._marks.items() if m in kinds)

    def undirected_edges(self) -> list[tuple[int, int]]:
        return self.edges_with_marks((EdgeMark.UNDIRECTED,))

    def proposed_edges(self) -> list[tuple[int, int]]:
        return self.edges_with_marks((EdgeMark.PROPOSED_FWD, EdgeMark.PROPOSED_BWD))

    def ambiguous_edges(self) -> list[tuple[int, int]]:
        return self.edges_with_marks((EdgeMark.AMBIGUOUS,))

    def all_fixed(self) -> bool:
        return all(m in FIXED_MARKS for m in self._marks.values())

    def directed_path_exists(self, frm: int, to: int, kinds=("fixed",)) -> bool:
        """True iff a directed path frm ~> to of length >= 2 exists.

        ``kinds`` selects which marks count as pointing forward: any of
        "fixed", "proposed", "ambiguous". Ambiguous edges point both ways.
        The direct frm--to edge alone never counts (paths need >= 2 edges).
        """
        forward = set()
        if "fixed" in kinds:
            forward.add(EdgeMark.FIXED_FWD)
        if "proposed" in kinds:
            forward.add(EdgeMark.PROPOSED_FWD)
        if "ambiguous" in kinds:
            forward.add(EdgeMark.AMBIGUOUS)
        stack = []
        for w in self._nbrs[frm]:
            if w != to and self.mark_from(frm, w) in forward:
                stack.append(w)
        seen = set(stack) | {frm}
        while stack:
            node = stack.pop()
            if node == to:
                return True
            for w in self._nbrs[node]:
                if w not in seen and self.mark_from(node, w) in forward:
                    seen.add(w)
                    stack.append(w)
        return False

    def fixed_subgraph_acyclic(self) -> bool:
        parents = [set() for _ in range(self.n)]
        for (a, b), m in self._marks.items():
            if m is EdgeMark.FIXED_FWD:
                parents[b].add(a)
            elif m is EdgeMark.FIXED_BWD:
                parents[a].add(b)
        try:
            _toposort(parents)
            return True
        except ValueError:
            return False

    # -- mutators -------------------------------------------------------------

    def _set(self, x: int, y: int, mark_from_x: EdgeMark) -> None:
        a, b = min(x, y), max(x, y)
        if (a, b) not in self._marks:
            raise ValueError(f"no edge between {x} and {y}")
        self._marks[(a, b)] = mark_from_x if x == a else _FLIP[mark_from_x]

    def set_fixed(self, x: int, y: int) -> None:
        """Fix the edge as x -> y; refuses to flip an already fixed edge."""
        if self.mark_from(x, y) is EdgeMark.FIXED_BWD:
            raise ValueError(f"edge {x}--{y} already fixed in the opposite direction")
        self._set(x, y, EdgeMark.FIXED_FWD)
        assert self.fixed_subgraph_acyclic(), f"fixing {x}->{y} created a fixed cycle"

    def set_proposed(self, x: int, y: int) -> None:
        self._set(x, y, EdgeMark.PROPOSED_FWD)

    def set_ambiguous(self, x: int, y: int) -> None:
        self._set(x, y, EdgeMark.AMBIGUOUS)

    def set_undirected(self, x: int, y: int) -> None:
        self._set(x, y, EdgeMark.UNDIRECTED)


def extract_dag(pdag: Pdag) -> Dag:
    """Read a Dag off a fully fixed Pdag; fails if any mark is not fixed."""
    parents = [set() for _ in range(pdag.n)]
    for a, b in pdag.edges():
        m = pdag.mark(a, b)
        if m is EdgeMark.FIXED_FWD:
            parents[b].add(a)
        elif m is EdgeMark.FIXED_BWD:
            parents[a].add(b)
        else:
            raise ValueError(f"edge ({a},{b}) has non-fixed mark {m.value}")
    return Dag(pdag.n, tuple(frozenset(p) for p in parents))


def random_dag(n: int, edge_prob: float, rng=None) -> Dag:
    """Random DAG: uniform node permutation, each forward edge kept with edge_prob."""
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must be in [0, 1]")
    gen = as_rng(rng)
    perm = gen.permutation(n)
    parents = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if gen.random() < edge_prob:
                parents[perm[j]].add(int(perm[i]))
    return Dag(n, tuple(frozenset(p) for p in parents))


def to_edge_list_text(dag: Dag, schema: Schema) -> str:
    """One `parent -> child` line per edge, using variable names."""
    names = schema.names()
    return "".join(f"{names[p]} -> {names[c]}\n" for p, c in dag.edges())


def to_dot(dag: Dag, schema: Schema) -> str:
    names = schema.names()
    lines = ["digraph bn {"]
    for v in range(dag.n):
        lines.append(f'  "{names[v]}";')
    for p, c in dag.edges():
        lines.append(f'  "{names[p]}" -> "{names[c]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def structural_errors(learned: Dag, truth: Dag) -> dict[str, int]:
    """Missing/extra skeleton edges and misoriented shared edges vs a reference."""
    skel_l = to_skeleton(learned).edges
    skel_t = to_skeleton(truth).edges
    miso = 0
    for a, b in skel_l & skel_t:
        if learned.has_edge(a, b) != truth.has_edge(a, b):
            miso += 1
    return {
        "missing": len(skel_t - skel_l),
        "extra": len(skel_l - skel_t),
        "misoriented": miso,
    }
