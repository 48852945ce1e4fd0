"""Approximation algorithms: greedy temporal edge cover and snapshot matching."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Set, Tuple

from static_alg import SetSystem, greedy_set_cover, harmonic, max_matching_static
from temporal_graph import (SolutionKind, SolutionSet, TemporalGraph, TemporalVertex,
                            coverable_universe, snapshot)

logger = logging.getLogger(__name__)


@dataclass
class ApproxReport:
    """Solution plus per-step sizes and the proven approximation factor.

    For the cover, per_step holds (vertex, sets chosen for it); for the
    matching, (time, size of the snapshot's maximum matching).
    """
    solution: SolutionSet
    bound_factor: Fraction
    per_step: List[Tuple[int, int]] = field(default_factory=list)
    chosen_time: int = 0

    @property
    def size(self) -> int:
        return self.solution.size


def greedy_temporal_edge_cover(G: TemporalGraph) -> ApproxReport:
    """Visit vertices in ascending order; for each, solve greedily the set
    cover of its uncovered times by the label sets of its incident edges.
    The result is within 2 H(tau) of the optimum."""
    universe = coverable_universe(G)
    covered: Set[TemporalVertex] = set()
    chosen: Set = set()
    per_step: List[Tuple[int, int]] = []

    for v in G.base.vertices:
        pending = frozenset(t for t in range(1, G.tau + 1)
                            if TemporalVertex(v, t) in universe
                            and TemporalVertex(v, t) not in covered)
        if not pending:
            continue
        incident = G.base.incident_edges(v)
        system = SetSystem(pending, tuple(G.labels[e] & pending for e in incident))
        picks = greedy_set_cover(system)
        for index in picks:
            edge = incident[index]
            chosen.add(edge)
            covered |= G.temporal_endpoints(edge)
        per_step.append((v, len(picks)))
        logger.debug("vertex %d: %d uncovered times, %d edges", v, len(pending), len(picks))

    factor = 2 * harmonic(G.tau)
    return ApproxReport(SolutionSet(SolutionKind.COVER, frozenset(chosen)), factor, per_step)


def snapshot_matching_approx(G: TemporalGraph) -> ApproxReport:
    """Largest static maximum matching over all snapshots, smallest time on
    ties; within a factor tau of the optimum."""
    best_t, best = 1, frozenset()
    per_step: List[Tuple[int, int]] = []
    for t in range(1, G.tau + 1):
        matching = max_matching_static(snapshot(G, t)).edges
        per_step.append((t, len(matching)))
        if len(matching) > len(best):
            best_t, best = t, matching
    logger.debug("snapshot sizes: %s", per_step)
    return ApproxReport(SolutionSet(SolutionKind.MATCHING, best), Fraction(G.tau),
                        per_step, best_t)
