"""Temporal graph data model, snapshots and solution verification."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Set, Tuple

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class GraphError(Exception):
    """Raised when a graph, a time or an edge reference is invalid."""
    pass


def make_edge(u: int, v: int) -> Edge:
    """Return the canonical (smaller, larger) pair for an undirected edge."""
    if u == v:
        raise GraphError(f"Self-loop on vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class StaticGraph:
    """Undirected loopless graph on the vertices 1..n."""

    n: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"Negative vertex count {self.n}")
        for u, v in self.edges:
            if u >= v:
                raise GraphError(f"Edge ({u}, {v}) is not in canonical form u < v")
            if u < 1 or v > self.n:
                raise GraphError(f"Edge ({u}, {v}) has an endpoint outside 1..{self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> 'StaticGraph':
        """Build a graph from unordered pairs; duplicates are an error."""
        edges: Set[Edge] = set()
        for u, v in pairs:
            edge = make_edge(u, v)
            if edge in edges:
                raise GraphError(f"Duplicate edge {edge}")
            edges.add(edge)
        return cls(n, frozenset(edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def adjacency(self) -> Dict[int, Tuple[int, ...]]:
        """Sorted neighbour tuples for every vertex."""
        nbrs: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for u, v in self.sorted_edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in nbrs.items()}

    def incident_edges(self, v: int) -> Tuple[Edge, ...]:
        return tuple(make_edge(v, w) for w in self.adjacency[v])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges_within(self, vertices: Iterable[int]) -> Tuple[Edge, ...]:
        """E(X): edges with both endpoints in X, sorted."""
        inside = set(vertices)
        return tuple(e for e in self.sorted_edges if e[0] in inside and e[1] in inside)


@dataclass(frozen=True, order=True)
class TemporalVertex:
    """Occurrence of vertex v at time t."""

    v: int
    t: int

    def __repr__(self) -> str:
        return f"({self.v},{self.t})"


@dataclass(frozen=True)
class TemporalGraph:
    """A static graph plus a non-empty set of times in 1..tau per edge."""

    base: StaticGraph
    tau: int
    labels: Mapping[Edge, FrozenSet[int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.tau < 1:
            raise GraphError(f"Lifetime must be positive, got {self.tau}")
        if set(self.labels) != set(self.base.edges):
            missing = sorted(set(self.base.edges) - set(self.labels))
            extra = sorted(set(self.labels) - set(self.base.edges))
            raise GraphError(f"Label map does not match the edge set "
                             f"(missing {missing}, extra {extra})")
        for edge, times in self.labels.items():
            if not times:
                raise GraphError(f"Edge {edge} has an empty label set")
            for t in times:
                if not 1 <= t <= self.tau:
                    raise GraphError(f"Edge {edge} has label {t} outside 1..{self.tau}")

    @classmethod
    def from_labels(cls, n: int, tau: int,
                    labels: Mapping[Tuple[int, int], Iterable[int]]) -> 'TemporalGraph':
        """Build a temporal graph from {(u, v): times}; pairs may be unordered."""
        canonical: Dict[Edge, FrozenSet[int]] = {}
        for (u, v), times in labels.items():
            edge = make_edge(u, v)
            if edge in canonical:
                raise GraphError(f"Duplicate edge {edge}")
            canonical[edge] = frozenset(times)
        base = StaticGraph(n, frozenset(canonical))
        return cls(base, tau, canonical)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self.base.sorted_edges

    def label(self, edge: Edge) -> FrozenSet[int]:
        try:
            return self.labels[make_edge(*edge)]
        except KeyError:
            raise GraphError(f"Edge {edge} is not in the graph") from None

    def temporal_endpoints(self, edge: Edge) -> FrozenSet[TemporalVertex]:
        """V^T({e}): both endpoints at every time of the edge."""
        u, v = edge
        return frozenset(TemporalVertex(w, t) for t in self.label(edge) for w in (u, v))

    def check_time(self, t: int):
        if not 1 <= t <= self.tau:
            raise GraphError(f"Time {t} outside 1..{self.tau}")

    @cached_property
    def universe(self) -> FrozenSet[TemporalVertex]:
        return frozenset(tv for e in self.edges for tv in self.temporal_endpoints(e))


class SolutionKind(Enum):
    """What a solution set claims to be."""
    COVER = 'cover'
    MATCHING = 'matching'


@dataclass(frozen=True)
class SolutionSet:
    """A subset of the underlying edges, tagged as cover or matching."""

    kind: SolutionKind
    edges: FrozenSet[Edge] = frozenset()

    @classmethod
    def of(cls, kind: SolutionKind, edges: Iterable[Tuple[int, int]]) -> 'SolutionSet':
        return cls(kind, frozenset(make_edge(u, v) for u, v in edges))

    @property
    def size(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)


@dataclass
class CoverReport:
    """Outcome of checking a candidate temporal edge cover."""
    ok: bool
    uncovered: List[TemporalVertex] = field(default_factory=list)


@dataclass
class MatchingReport:
    """Outcome of checking a candidate temporal matching."""
    ok: bool
    conflicts: List[Tuple[Edge, Edge]] = field(default_factory=list)


def snapshot(G: TemporalGraph, t: int) -> StaticGraph:
    """Spanning subgraph of the edges active at time t."""
    G.check_time(t)
    return StaticGraph(G.n, frozenset(e for e, times in G.labels.items() if t in times))


def is_isolated(G: TemporalGraph, v: int, t: int) -> bool:
    """True iff no edge incident to v is active at time t."""
    G.check_time(t)
    if not 1 <= v <= G.n:
        raise GraphError(f"Vertex {v} outside 1..{G.n}")
    return all(t not in G.labels[e] for e in G.base.incident_edges(v))


def coverable_universe(G: TemporalGraph) -> FrozenSet[TemporalVertex]:
    """All non-isolated temporal vertices of G."""
    return G.universe


def _check_edges(G: TemporalGraph, S: SolutionSet):
    for edge in S.edges:
        if edge not in G.labels:
            raise GraphError(f"Solution edge {edge} is not in the graph")


def verify_edge_cover(G: TemporalGraph, S: SolutionSet) -> CoverReport:
    """Check that every coverable temporal vertex has an active incident edge in S."""
    _check_edges(G, S)
    covered: Set[TemporalVertex] = set()
    for edge in S.edges:
        covered |= G.temporal_endpoints(edge)
    uncovered = sorted(coverable_universe(G) - covered)
    if uncovered:
        logger.debug("cover misses %d temporal vertices", len(uncovered))
    return CoverReport(ok=not uncovered, uncovered=uncovered)


def edges_conflict(G: TemporalGraph, e: Edge, f: Edge) -> bool:
    """Two edges conflict iff they share an endpoint and a time."""
    return bool(set(e) & set(f)) and bool(G.label(e) & G.label(f))


def verify_matching(G: TemporalGraph, M: SolutionSet) -> MatchingReport:
    """Check that distinct edges of M are vertex-disjoint or time-disjoint."""
    _check_edges(G, M)
    conflicts = [(e, f) for e, f in combinations(M.sorted_edges(), 2)
                 if edges_conflict(G, e, f)]
    return MatchingReport(ok=not conflicts, conflicts=conflicts)
