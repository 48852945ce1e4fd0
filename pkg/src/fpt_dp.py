"""Dynamic programs over nice tree decompositions.

Both programs index their tables by a pair of bit sets over the canonical
orderings of a bag: the chosen bag edges and the bag temporal vertices that
the partial solution touches. Tables are sparse; a key that was never
produced reads as INFEASIBLE.

Minimum temporal edge cover, T_t(S, C): fewest edges S' below t with
S' restricted to E(X_t) equal to S, covering exactly C inside the bag and
everything coverable that was already forgotten.

Maximum temporal matching, T_t(N, C): most edges of a temporal matching M
below t with M restricted to E(X_t) equal to N and touching exactly C
inside the bag.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from temporal_graph import (Edge, SolutionKind, SolutionSet, TemporalGraph,
                            TemporalVertex)
from treedec import NiceTreeDecomposition, NodeKind, validate_nice

logger = logging.getLogger(__name__)

Key = Tuple[int, int]


class DPError(Exception):
    """Raised when a program cannot run on the given decomposition."""
    pass


class Sentinel(Enum):
    INFEASIBLE = 'infeasible'


INFEASIBLE = Sentinel.INFEASIBLE


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _translate(mask: int, mapping: Sequence[Optional[int]]) -> int:
    """Move a bit set to another ordering; bits mapped to None are dropped."""
    out = 0
    for i in _bits(mask):
        j = mapping[i]
        if j is not None:
            out |= 1 << j
    return out


def bit_string(mask: int, width: int) -> str:
    """Bit i of the mask as character i; '-' for an empty ordering."""
    if width == 0:
        return '-'
    return ''.join('1' if mask >> i & 1 else '0' for i in range(width))


@dataclass
class BagContext:
    """Canonical orderings of one bag: vertices, E(X_t) and the coverable
    temporal vertices of X_t."""

    node: int
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    temporal_vertices: Tuple[TemporalVertex, ...]
    edge_index: Dict[Edge, int] = field(default_factory=dict)
    tv_index: Dict[TemporalVertex, int] = field(default_factory=dict)
    edge_masks: List[int] = field(default_factory=list)
    vertex_masks: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def build(cls, G: TemporalGraph, node: int, bag) -> 'BagContext':
        vertices = tuple(sorted(bag))
        edges = G.base.edges_within(vertices)
        universe = G.universe
        tvs = tuple(TemporalVertex(v, t) for v in vertices for t in range(1, G.tau + 1)
                    if TemporalVertex(v, t) in universe)
        ctx = cls(node, vertices, edges, tvs)
        ctx.edge_index = {e: i for i, e in enumerate(edges)}
        ctx.tv_index = {tv: i for i, tv in enumerate(tvs)}
        ctx.vertex_masks = {v: 0 for v in vertices}
        for i, tv in enumerate(tvs):
            ctx.vertex_masks[tv.v] |= 1 << i
        ctx.edge_masks = [ctx.cover_mask(G, e) for e in edges]
        return ctx

    def cover_mask(self, G: TemporalGraph, edge: Edge) -> int:
        return sum(1 << self.tv_index[tv] for tv in G.temporal_endpoints(edge))

    def covered_by(self, edge_mask: int) -> int:
        """V^T of a set of bag edges, as a temporal-vertex mask."""
        out = 0
        for i in _bits(edge_mask):
            out |= self.edge_masks[i]
        return out

    def edges_at(self, v: int) -> List[int]:
        return [i for i, e in enumerate(self.edges) if v in e]

    def edge_set(self, edge_mask: int) -> List[Edge]:
        return [self.edges[i] for i in _bits(edge_mask)]

    def mapping_to(self, other: 'BagContext') -> Tuple[List[Optional[int]], List[Optional[int]]]:
        """Bit mappings of edges and temporal vertices from self into other."""
        edge_map = [other.edge_index.get(e) for e in self.edges]
        tv_map = [other.tv_index.get(tv) for tv in self.temporal_vertices]
        return edge_map, tv_map


@dataclass
class DPTable:
    """Sparse table of one node plus the choice that produced each entry."""

    context: BagContext
    values: Dict[Key, int] = field(default_factory=dict)
    choices: Dict[Key, object] = field(default_factory=dict)

    def value(self, S: int, C: int) -> Union[int, Sentinel]:
        return self.values.get((S, C), INFEASIBLE)

    def __len__(self) -> int:
        return len(self.values)

    def entry_bound(self) -> int:
        """2^|E(X_t)| * 2^|coverable X_t x [tau]|."""
        return 2 ** len(self.context.edges) * 2 ** len(self.context.temporal_vertices)


class TableProgram:
    """Shared driver: tables are filled children first, one transition per
    node kind, keeping the first best value in enumeration order."""

    kind: SolutionKind

    def __init__(self, G: TemporalGraph, D: NiceTreeDecomposition):
        if not isinstance(D, NiceTreeDecomposition):
            raise DPError("Dynamic programs need a nice tree decomposition")
        report = validate_nice(G.base, D)
        if not report.valid:
            raise DPError("Invalid decomposition: " + "; ".join(report.violations))
        self.G = G
        self.D = D
        self._contexts: Dict[int, BagContext] = {}

    def better(self, new: int, old: int) -> bool:
        raise NotImplementedError

    def context(self, node: int) -> BagContext:
        if node not in self._contexts:
            self._contexts[node] = BagContext.build(self.G, node, self.D.bags[node])
        return self._contexts[node]

    def offer(self, table: DPTable, key: Key, value: int, choice):
        old = table.values.get(key)
        if old is None or self.better(value, old):
            table.values[key] = value
            table.choices[key] = choice

    def transition(self, node: int, *children: DPTable) -> DPTable:
        """Table of node computed from its complete child tables."""
        kind = self.D.kind(node)
        ctx = self.context(node)
        if kind == NodeKind.LEAF:
            table = DPTable(ctx)
            table.values[(0, 0)] = 0
            table.choices[(0, 0)] = None
            return table
        if kind == NodeKind.INTRODUCE:
            return self.introduce(ctx, children[0], self.D.vertex[node])
        if kind == NodeKind.FORGET:
            return self.forget(ctx, children[0], self.D.vertex[node])
        if kind == NodeKind.JOIN:
            return self.join(ctx, children[0], children[1])
        raise DPError(f"Node {node} has kind {kind.value}")

    def introduce(self, ctx: BagContext, child: DPTable, v: int) -> DPTable:
        edge_map, tv_map = child.context.mapping_to(ctx)
        options = self.introduced_edge_sets(ctx, v)
        table = DPTable(ctx)
        for (S, C), value in child.values.items():
            base_S = _translate(S, edge_map)
            base_C = _translate(C, tv_map)
            for F, covered, size in options:
                if not self.accepts(base_C, covered):
                    continue
                self.offer(table, (base_S | F, base_C | covered), value + size, ((S, C), F))
        return table

    def introduced_edge_sets(self, ctx: BagContext, v: int) -> List[Tuple[int, int, int]]:
        """Subsets F of the bag edges at v as (edge mask, V^T(F), |F|)."""
        at_v = ctx.edges_at(v)
        options = []
        for size in range(len(at_v) + 1):
            for chosen in combinations(at_v, size):
                if not self.admissible(ctx, chosen):
                    continue
                F = sum(1 << i for i in chosen)
                options.append((F, ctx.covered_by(F), size))
        options.sort()
        return options

    def admissible(self, ctx: BagContext, chosen: Tuple[int, ...]) -> bool:
        return True

    def accepts(self, child_covered: int, covered: int) -> bool:
        return True

    def forget(self, ctx: BagContext, child: DPTable, v: int) -> DPTable:
        edge_map, tv_map = child.context.mapping_to(ctx)
        required = child.context.vertex_masks[v]
        table = DPTable(ctx)
        for (S, C), value in child.values.items():
            if not self.forgettable(C, required):
                continue
            key = (_translate(S, edge_map), _translate(C, tv_map))
            self.offer(table, key, value, (S, C))
        return table

    def forgettable(self, C: int, required: int) -> bool:
        return True

    def join(self, ctx: BagContext, left: DPTable, right: DPTable) -> DPTable:
        by_edges: Dict[int, List[Tuple[int, int]]] = {}
        for (S, C), value in right.values.items():
            by_edges.setdefault(S, []).append((C, value))
        table = DPTable(ctx)
        for (S, C1), a in left.values.items():
            covered = ctx.covered_by(S)
            size = bin(S).count('1')
            for C2, b in by_edges.get(S, ()):
                combined = self.merge(C1, C2, covered)
                if combined is None:
                    continue
                self.offer(table, (S, combined), a + b - size, ((S, C1), (S, C2)))
        return table

    def merge(self, C1: int, C2: int, covered: int) -> Optional[int]:
        return C1 | C2

    def run(self) -> Dict[int, DPTable]:
        """Fill every table in post-order."""
        tables: Dict[int, DPTable] = {}
        for node in self.D.post_order():
            kids = [tables[c] for c in self.D.children.get(node, ())]
            tables[node] = self.transition(node, *kids)
            logger.debug("node %d (%s): %d entries", node, self.D.kind(node).value,
                          len(tables[node]))
        return tables


class CoverProgram(TableProgram):
    """Minimum temporal edge cover."""

    kind = SolutionKind.COVER

    def better(self, new: int, old: int) -> bool:
        return new < old

    def forgettable(self, C: int, required: int) -> bool:
        return C & required == required


class MatchingProgram(TableProgram):
    """Maximum temporal matching."""

    kind = SolutionKind.MATCHING

    def better(self, new: int, old: int) -> bool:
        return new > old

    def admissible(self, ctx: BagContext, chosen: Tuple[int, ...]) -> bool:
        # edges at v must be pairwise time-disjoint
        return all(not (ctx.edge_masks[i] & ctx.edge_masks[j])
                   for i, j in combinations(chosen, 2))

    def accepts(self, child_covered: int, covered: int) -> bool:
        return not child_covered & covered

    def merge(self, C1: int, C2: int, covered: int) -> Optional[int]:
        if C1 & C2 != covered:
            return None
        return C1 | C2


@dataclass
class DPResult:
    size: int
    solution: SolutionSet
    tables: Dict[int, DPTable]


def extract_solution(program: TableProgram, tables: Dict[int, DPTable]) -> SolutionSet:
    """Replay the stored choices from the root entry (empty, empty)."""
    D = program.D
    if (0, 0) not in tables[D.root].values:
        raise DPError("Root entry is infeasible")

    edges = set()
    stack = [(D.root, (0, 0))]
    while stack:
        node, key = stack.pop()
        table = tables[node]
        choice = table.choices[key]
        kind = D.kind(node)
        kids = D.children.get(node, ())
        if kind == NodeKind.INTRODUCE:
            child_key, F = choice
            edges.update(table.context.edge_set(F))
            stack.append((kids[0], child_key))
        elif kind == NodeKind.FORGET:
            stack.append((kids[0], choice))
        elif kind == NodeKind.JOIN:
            stack.append((kids[0], choice[0]))
            stack.append((kids[1], choice[1]))
    return SolutionSet(program.kind, frozenset(edges))


def solve(program: TableProgram) -> DPResult:
    """Run a program and extract an optimal solution."""
    tables = program.run()
    size = tables[program.D.root].value(0, 0)
    if size is INFEASIBLE:
        raise DPError("Root entry is infeasible")
    solution = extract_solution(program, tables)
    if solution.size != size:
        raise DPError(f"Extracted {solution.size} edges for optimum {size}")
    logger.info("%s program: optimum %d over %d nodes", program.kind.value, size, len(tables))
    return DPResult(size, solution, tables)


def fpt_min_edge_cover(G: TemporalGraph, D: NiceTreeDecomposition) -> Tuple[int, SolutionSet]:
    """Minimum temporal edge cover in time exponential in width and lifetime only."""
    result = solve(CoverProgram(G, D))
    return result.size, result.solution


def fpt_max_matching(G: TemporalGraph, D: NiceTreeDecomposition) -> Tuple[int, SolutionSet]:
    result = solve(MatchingProgram(G, D))
    return result.size, result.solution


def dump_tables(tables: Dict[int, DPTable]) -> str:
    """One line per entry: <node> <S-bits> <C-bits> <value>."""
    lines = []
    for node in sorted(tables):
        table = tables[node]
        ctx = table.context
        for (S, C), value in sorted(table.values.items()):
            lines.append(f"{node} {bit_string(S, len(ctx.edges))} "
                         f"{bit_string(C, len(ctx.temporal_vertices))} {value}")
    return '\n'.join(lines) + '\n'
