"""Shared instance builders for the test suite."""

import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../src'))

from static_alg import SetSystem
from temporal_graph import StaticGraph, TemporalGraph

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..')
INSTANCES = os.path.join(ROOT, 'instances')


def corpus_path(name: str) -> str:
    return os.path.join(INSTANCES, name)


def k2(times=(1, 2)) -> TemporalGraph:
    return TemporalGraph.from_labels(2, max(times), {(1, 2): times})


def path3() -> TemporalGraph:
    """u - v - w, both edges at time 1."""
    return TemporalGraph.from_labels(3, 1, {(1, 2): {1}, (2, 3): {1}})


def two_leaf_star() -> TemporalGraph:
    """r - x1 at time 1 and r - x2 at time 2."""
    return TemporalGraph.from_labels(3, 2, {(1, 2): {1}, (1, 3): {2}})


def three_star() -> TemporalGraph:
    return TemporalGraph.from_labels(4, 2, {(1, 2): {1}, (1, 3): {1}, (1, 4): {2}})


def tau_star(tau: int) -> TemporalGraph:
    """Star whose i-th edge exists only at time i."""
    return TemporalGraph.from_labels(tau + 1, tau, {(1, 1 + i): {i} for i in range(1, tau + 1)})


def triangle() -> TemporalGraph:
    return TemporalGraph.from_labels(3, 1, {(1, 2): {1}, (1, 3): {1}, (2, 3): {1}})


def edgeless(n: int = 3) -> TemporalGraph:
    return TemporalGraph(StaticGraph(n), 1, {})


def spider_system() -> SetSystem:
    return SetSystem.of({1, 2}, [{1}, {2}])


def two_path(n: int, tau: int = 3) -> TemporalGraph:
    """Edges i - i+1 and i - i+2; treewidth 2."""
    labels = {}
    for i in range(1, n):
        labels[(i, i + 1)] = {i % tau + 1, (i + 1) % tau + 1}
        if i + 2 <= n:
            labels[(i, i + 2)] = {(i + 2) % tau + 1}
    return TemporalGraph.from_labels(n, tau, labels)


def random_instance(rng: random.Random, max_n: int = 7, max_edges: int = 10,
                    max_tau: int = 3) -> TemporalGraph:
    """Random temporal graph within the given limits."""
    n = rng.randint(2, max_n)
    tau = rng.randint(1, max_tau)
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    rng.shuffle(pairs)
    count = rng.randint(0, min(max_edges, len(pairs)))
    labels = {}
    for pair in pairs[:count]:
        times = {t for t in range(1, tau + 1) if rng.random() < 0.5}
        labels[pair] = times or {rng.randint(1, tau)}
    return TemporalGraph.from_labels(n, tau, labels)


def random_instances(count: int, seed: int = 0, **limits):
    rng = random.Random(seed)
    return [random_instance(rng, **limits) for _ in range(count)]


def random_connected_graph(rng: random.Random, max_n: int = 8) -> StaticGraph:
    """Random spanning tree plus up to n - 1 extra edges."""
    n = rng.randint(2, max_n)
    edges = {(rng.randint(1, v - 1), v) for v in range(2, n + 1)}
    others = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if (u, v) not in edges]
    rng.shuffle(others)
    edges |= set(others[:rng.randint(0, n - 1)])
    return StaticGraph(n, frozenset(edges))
