"""Static-graph subroutines: maximum matching, Gallai edge cover, set cover."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from temporal_graph import Edge, StaticGraph, make_edge

logger = logging.getLogger(__name__)

# Largest edge count the exhaustive matching oracle accepts.
EXHAUSTIVE_MATCHING_LIMIT = 14


class SetSystemError(Exception):
    """Raised for malformed set systems and uncoverable inputs."""
    pass


@dataclass(frozen=True)
class SetSystem:
    """A universe and an ordered list of subsets of it."""

    universe: FrozenSet[int]
    sets: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        for index, s in enumerate(self.sets):
            if not s <= self.universe:
                raise SetSystemError(f"Set {index} has elements outside the universe: "
                                     f"{sorted(s - self.universe)}")

    @classmethod
    def of(cls, universe, sets) -> 'SetSystem':
        return cls(frozenset(universe), tuple(frozenset(s) for s in sets))

    @property
    def m(self) -> int:
        return len(self.sets)

    def is_coverable(self) -> bool:
        return frozenset().union(*self.sets) >= self.universe

    def covers(self, indices: Sequence[int]) -> bool:
        return frozenset().union(*(self.sets[i] for i in indices)) >= self.universe


@dataclass(frozen=True)
class StaticMatching:
    edges: FrozenSet[Edge]

    @property
    def size(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class StaticEdgeCover:
    edges: FrozenSet[Edge]

    @property
    def size(self) -> int:
        return len(self.edges)


def to_networkx(H: StaticGraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(H.vertices)
    graph.add_edges_from(H.sorted_edges)
    return graph


def is_static_matching(edges) -> bool:
    seen = set()
    for u, v in edges:
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def max_matching_static(H: StaticGraph) -> StaticMatching:
    """Maximum-cardinality matching by Edmonds' blossom algorithm."""
    matched = nx.max_weight_matching(to_networkx(H), maxcardinality=True)
    return StaticMatching(frozenset(make_edge(u, v) for u, v in matched))


def exhaustive_max_matching_static(H: StaticGraph) -> StaticMatching:
    """Brute-force maximum matching over all edge subsets; test oracle."""
    if len(H.edges) > EXHAUSTIVE_MATCHING_LIMIT:
        raise SetSystemError(f"Exhaustive matching is limited to "
                             f"{EXHAUSTIVE_MATCHING_LIMIT} edges, got {len(H.edges)}")
    for k in range(min(len(H.edges), H.n // 2), 0, -1):
        for subset in combinations(H.sorted_edges, k):
            if is_static_matching(subset):
                return StaticMatching(frozenset(subset))
    return StaticMatching(frozenset())


def min_edge_cover_static(H: StaticGraph) -> StaticEdgeCover:
    """Gallai construction: a maximum matching plus, for every vertex it
    leaves exposed, the incident edge with the smallest endpoint pair."""
    isolated = [v for v in H.vertices if H.degree(v) == 0]
    if isolated:
        raise SetSystemError(f"No edge cover exists: vertex {isolated[0]} is isolated")

    cover = set(max_matching_static(H).edges)
    logger.debug("maximum matching of size %d", len(cover))
    saturated = {w for e in cover for w in e}
    for v in H.vertices:
        if v not in saturated:
            cover.add(min(H.incident_edges(v)))
    return StaticEdgeCover(frozenset(cover))


def matching_from_edge_cover(H: StaticGraph, cover: StaticEdgeCover) -> StaticMatching:
    """Reverse Gallai step. A minimum edge cover is a forest of stars; one
    edge per star is a matching of size n - |cover|."""
    forest = nx.Graph()
    forest.add_nodes_from(H.vertices)
    forest.add_edges_from(cover.edges)
    matching = []
    for component in sorted(nx.connected_components(forest), key=min):
        part = forest.subgraph(component)
        star = sorted(make_edge(u, v) for u, v in part.edges)
        if not star:
            continue
        if max(d for _, d in part.degree) != len(star):
            raise SetSystemError("Edge cover is not a forest of stars (not minimum)")
        matching.append(star[0])
    return StaticMatching(frozenset(matching))


def greedy_set_cover(system: SetSystem) -> List[int]:
    """Greedy cover: repeatedly take the set covering the most uncovered
    elements, lowest index on ties."""
    if not system.is_coverable():
        raise SetSystemError("The sets do not cover the universe")

    uncovered = set(system.universe)
    chosen: List[int] = []
    while uncovered:
        best, gain = -1, 0
        for index, s in enumerate(system.sets):
            g = len(s & uncovered)
            if g > gain:
                best, gain = index, g
        chosen.append(best)
        uncovered -= system.sets[best]
    return chosen


def exact_set_cover(system: SetSystem, limit: Optional[int] = None) -> List[int]:
    """Smallest cover by exhaustive search; lexicographically least indices."""
    if not system.is_coverable():
        raise SetSystemError("The sets do not cover the universe")
    if not system.universe:
        return []
    top = system.m if limit is None else min(limit, system.m)
    for k in range(1, top + 1):
        for indices in combinations(range(system.m), k):
            if system.covers(indices):
                return list(indices)
    raise SetSystemError(f"No cover with at most {top} sets")


def max_set_packing(system: SetSystem) -> List[int]:
    """Largest pairwise-disjoint subcollection by exhaustive search."""
    for k in range(system.m, 0, -1):
        for indices in combinations(range(system.m), k):
            if all(not (system.sets[i] & system.sets[j]) for i, j in combinations(indices, 2)):
                return list(indices)
    return []


def harmonic(k: int):
    """H(k) = 1 + 1/2 + ... + 1/k as an exact fraction."""
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))
