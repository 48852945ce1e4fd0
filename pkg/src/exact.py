"""Exhaustive and branch-and-bound oracles for temporal edge cover and matching."""

import logging
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx

from config import DEFAULT_MAX_EDGES, max_edges_from_env
from temporal_graph import (SolutionKind, SolutionSet, TemporalGraph,
                            coverable_universe, edges_conflict)

logger = logging.getLogger(__name__)


class BudgetExceeded(Exception):
    """Raised when an instance is too large for the requested search."""
    pass


@dataclass(frozen=True)
class SearchBudget:
    """Exhaustive search runs up to max_edges edges; above that a
    branch-and-bound runs only when a time limit (seconds) is given."""
    max_edges: int = DEFAULT_MAX_EDGES
    time_limit: Optional[float] = None


def search_budget(time_limit: Optional[float] = None) -> SearchBudget:
    """Budget with the edge cap taken from the environment."""
    return SearchBudget(max_edges_from_env(), time_limit)


class _Clock:
    def __init__(self, limit: Optional[float]):
        self.limit = limit
        self.start = time.monotonic()
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.limit is not None and self.nodes % 1024 == 0:
            if time.monotonic() - self.start > self.limit:
                raise BudgetExceeded(f"Time limit of {self.limit}s exceeded "
                                     f"after {self.nodes} search nodes")


def _check_budget(G: TemporalGraph, budget: SearchBudget) -> bool:
    """True for exhaustive mode, False for branch-and-bound."""
    m = len(G.edges)
    if m <= budget.max_edges:
        return True
    if budget.time_limit is None:
        raise BudgetExceeded(f"{m} edges exceed the exhaustive cap of {budget.max_edges}; "
                             f"set a time limit for branch-and-bound")
    logger.info("%d edges above cap %d, using branch-and-bound", m, budget.max_edges)
    return False


def _coverage_masks(G: TemporalGraph) -> Tuple[List[int], int]:
    index = {tv: i for i, tv in enumerate(sorted(coverable_universe(G)))}
    masks = [sum(1 << index[tv] for tv in G.temporal_endpoints(e)) for e in G.edges]
    return masks, (1 << len(index)) - 1


def _cover_lower_bound(masks: List[int], uncovered: int) -> int:
    """Fewest edges whose coverage sizes could sum to the uncovered count."""
    need = bin(uncovered).count('1')
    gains = sorted((bin(m & uncovered).count('1') for m in masks), reverse=True)
    k = 0
    while need > 0 and k < len(gains) and gains[k] > 0:
        need -= gains[k]
        k += 1
    return k


def brute_min_edge_cover(G: TemporalGraph,
                         budget: SearchBudget = SearchBudget()) -> Tuple[int, SolutionSet]:
    """Minimum temporal edge cover; the lexicographically least one in
    exhaustive mode."""
    exhaustive = _check_budget(G, budget)
    masks, full = _coverage_masks(G)
    clock = _Clock(budget.time_limit)
    if exhaustive:
        chosen = _exhaustive_cover(masks, full, clock)
    else:
        chosen = _branch_and_bound_cover(masks, full, clock)
    edges = frozenset(G.edges[i] for i in chosen)
    logger.debug("cover search: %d nodes, optimum %d", clock.nodes, len(edges))
    return len(edges), SolutionSet(SolutionKind.COVER, edges)


def _exhaustive_cover(masks: List[int], full: int, clock: _Clock) -> List[int]:
    m = len(masks)
    # suffix[i]: everything edges i.. can still cover
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] | masks[i]

    def search(start: int, k: int, covered: int, chosen: List[int]) -> Optional[List[int]]:
        clock.tick()
        if k == 0:
            return list(chosen) if covered == full else None
        for i in range(start, m - k + 1):
            if covered | suffix[i] != full:
                return None
            chosen.append(i)
            found = search(i + 1, k - 1, covered | masks[i], chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    for k in range(_cover_lower_bound(masks, full), m + 1):
        found = search(0, k, 0, [])
        if found is not None:
            return found
    return list(range(m))


def _branch_and_bound_cover(masks: List[int], full: int, clock: _Clock) -> List[int]:
    best = list(range(len(masks)))
    covering: Dict[int, List[int]] = {}
    for i, mask in enumerate(masks):
        bits = mask
        while bits:
            low = bits & -bits
            covering.setdefault(low.bit_length() - 1, []).append(i)
            bits ^= low

    def search(covered: int, chosen: List[int]):
        nonlocal best
        clock.tick()
        if covered == full:
            if len(chosen) < len(best):
                best = sorted(chosen)
            return
        uncovered = full & ~covered
        if len(chosen) + _cover_lower_bound(masks, uncovered) >= len(best):
            return
        # branch on the lowest uncovered temporal vertex
        target = (uncovered & -uncovered).bit_length() - 1
        for i in covering[target]:
            chosen.append(i)
            search(covered | masks[i], chosen)
            chosen.pop()

    search(0, [])
    return best


def conflict_graph(G: TemporalGraph) -> nx.Graph:
    """Edges of G as nodes, adjacent iff they share a vertex and a time."""
    graph = nx.Graph()
    graph.add_nodes_from(G.edges)
    for e, f in combinations(G.edges, 2):
        if edges_conflict(G, e, f):
            graph.add_edge(e, f)
    return graph


def _conflict_masks(G: TemporalGraph) -> List[int]:
    index = {e: i for i, e in enumerate(G.edges)}
    masks = [0] * len(G.edges)
    for e, f in conflict_graph(G).edges:
        masks[index[e]] |= 1 << index[f]
        masks[index[f]] |= 1 << index[e]
    return masks


def _clique_cover_bound(conflicts: List[int], candidates: int) -> int:
    """Greedy partition of the candidates into conflict cliques; a matching
    takes at most one edge per clique."""
    cliques: List[int] = []
    bits = candidates
    while bits:
        low = bits & -bits
        i = low.bit_length() - 1
        for c, members in enumerate(cliques):
            if members & ~conflicts[i] == 0:
                cliques[c] |= low
                break
        else:
            cliques.append(low)
        bits ^= low
    return len(cliques)


def brute_max_matching(G: TemporalGraph,
                       budget: SearchBudget = SearchBudget()) -> Tuple[int, SolutionSet]:
    """Maximum temporal matching, i.e. a maximum independent set of the
    conflict graph; the lexicographically least one in exhaustive mode."""
    exhaustive = _check_budget(G, budget)
    conflicts = _conflict_masks(G)
    clock = _Clock(budget.time_limit)
    if exhaustive:
        chosen = _exhaustive_matching(conflicts, clock)
    else:
        chosen = _branch_and_bound_matching(conflicts, clock)
    edges = frozenset(G.edges[i] for i in chosen)
    logger.debug("matching search: %d nodes, optimum %d", clock.nodes, len(edges))
    return len(edges), SolutionSet(SolutionKind.MATCHING, edges)


def _exhaustive_matching(conflicts: List[int], clock: _Clock) -> List[int]:
    m = len(conflicts)

    def search(start: int, k: int, blocked: int, chosen: List[int]) -> Optional[List[int]]:
        clock.tick()
        if k == 0:
            return list(chosen)
        for i in range(start, m - k + 1):
            if blocked >> i & 1:
                continue
            chosen.append(i)
            found = search(i + 1, k - 1, blocked | conflicts[i], chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    for k in range(_clique_cover_bound(conflicts, (1 << m) - 1), 0, -1):
        found = search(0, k, 0, [])
        if found is not None:
            return found
    return []


def _branch_and_bound_matching(conflicts: List[int], clock: _Clock) -> List[int]:
    best: List[int] = []

    def search(candidates: int, chosen: List[int]):
        nonlocal best
        clock.tick()
        if not candidates:
            if len(chosen) > len(best):
                best = sorted(chosen)
            return
        if len(chosen) + _clique_cover_bound(conflicts, candidates) <= len(best):
            return
        low = candidates & -candidates
        i = low.bit_length() - 1
        chosen.append(i)
        search(candidates & ~low & ~conflicts[i], chosen)
        chosen.pop()
        search(candidates & ~low, chosen)

    search((1 << len(conflicts)) - 1, [])
    return best
