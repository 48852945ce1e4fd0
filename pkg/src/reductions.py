"""Gadgets and hardness reductions, with forward and backward translations
of solutions, plus seeded random instance generators."""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from static_alg import SetSystem, exact_set_cover, greedy_set_cover
from temporal_graph import (Edge, SolutionKind, SolutionSet, StaticGraph, TemporalGraph,
                            make_edge, verify_edge_cover, verify_matching)

logger = logging.getLogger(__name__)

# Sign pattern of the marks around a variable cycle, edge k joining v_k and v_k+1.
CYCLE_MARKS = (1, 0, 1, 0, 0, -1, 0, -1, 0, 0)
CYCLE_LENGTH = len(CYCLE_MARKS)
POSITIVE_SLOTS = (0, 2)
NEGATIVE_SLOTS = (5, 7)

# Vertices a clause adds in the cover reduction: z, w, three c's, three d's.
COVER_CLAUSE_VERTICES = 8

# Largest set count for which the inapproximability threshold uses the optimum.
EXACT_THRESHOLD_SETS = 16


class ReductionError(Exception):
    """Raised for invalid reduction inputs and failed back-translations."""
    pass


class GadgetKind(Enum):
    CLAUSE_COVER = 'clause-cover'
    CLAUSE_MATCHING = 'clause-matching'
    SAT_COVER = 'sat-cover'
    SAT_MATCHING = 'sat-matching'
    SETCOVER_TREE = 'setcover-tree'
    SETPACKING_STAR = 'setpacking-star'
    INAPPROX = 'inapprox'


@dataclass(frozen=True)
class Cnf22Formula:
    """CNF over x_1..x_n; literals are signed variable ids."""

    n: int
    clauses: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, n: int, clauses) -> 'Cnf22Formula':
        return cls(n, tuple(tuple(clause) for clause in clauses))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, sigma: Mapping[int, bool]) -> bool:
        return all(any(sigma[abs(lit)] == (lit > 0) for lit in clause)
                   for clause in self.clauses)


# Satisfiable: every assignment that is not constant satisfies it.
EXAMPLE_FORMULA = Cnf22Formula.of(3, [(1, 2, 3), (1, 2, 3), (-1, -2, -3), (-1, -2, -3)])


@dataclass
class FormulaReport:
    valid: bool
    violations: List[str] = field(default_factory=list)


def validate_cnf22(F: Cnf22Formula) -> FormulaReport:
    """Check clause arity and that each variable occurs twice positively
    and twice negatively."""
    violations = []
    positive = {i: 0 for i in range(1, F.n + 1)}
    negative = {i: 0 for i in range(1, F.n + 1)}
    for p, clause in enumerate(F.clauses):
        if len(clause) != 3:
            violations.append(f"clause {p} has {len(clause)} literals (expected 3)")
        if len({abs(lit) for lit in clause}) != len(clause):
            violations.append(f"clause {p} repeats a variable")
        for lit in clause:
            if lit == 0 or abs(lit) > F.n:
                violations.append(f"clause {p} has literal {lit} outside 1..{F.n}")
            elif lit > 0:
                positive[lit] += 1
            else:
                negative[-lit] += 1
    for i in range(1, F.n + 1):
        if positive[i] != 2:
            violations.append(f"variable {i} occurs {positive[i]} times positively (expected 2)")
        if negative[i] != 2:
            violations.append(f"variable {i} occurs {negative[i]} times negatively (expected 2)")
    return FormulaReport(not violations, violations)


def _require_valid(F: Cnf22Formula):
    report = validate_cnf22(F)
    if not report.valid:
        raise ReductionError(f"Not a 3SAT(2,2) formula: {report.violations[0]}")


@dataclass(frozen=True)
class VariableCycle:
    """The 10-cycle of variable i on vertices offset+1..offset+10; edge k
    joins the k-th and (k+1)-th vertex in cycle order."""

    i: int
    offset: int = 0

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(range(self.offset + 1, self.offset + CYCLE_LENGTH + 1))

    def endpoints(self, k: int) -> Tuple[int, int]:
        """Edge k as (tail, head) in cycle order."""
        return self.offset + k + 1, self.offset + (k + 1) % CYCLE_LENGTH + 1

    def edge(self, k: int) -> Edge:
        return make_edge(*self.endpoints(k))

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(self.edge(k) for k in range(CYCLE_LENGTH))

    @property
    def marks(self) -> Dict[Edge, int]:
        return {self.edge(k): sign * self.i for k, sign in enumerate(CYCLE_MARKS)}

    def marked(self, sign: int) -> Tuple[Edge, ...]:
        slots = POSITIVE_SLOTS if sign > 0 else NEGATIVE_SLOTS
        return tuple(self.edge(k) for k in slots)

    @property
    def first_matching(self) -> FrozenSet[Edge]:
        """Perfect matching holding both +i edges."""
        return frozenset(self.edge(k) for k in range(0, CYCLE_LENGTH, 2))

    @property
    def second_matching(self) -> FrozenSet[Edge]:
        """Perfect matching holding both -i edges."""
        return frozenset(self.edge(k) for k in range(1, CYCLE_LENGTH, 2))

    def graph(self) -> StaticGraph:
        return StaticGraph(self.offset + CYCLE_LENGTH, frozenset(self.edges))


def build_variable_cycle(i: int, offset: int = 0) -> VariableCycle:
    if i < 1:
        raise ReductionError(f"Variable index must be positive, got {i}")
    return VariableCycle(i, offset)


@dataclass(frozen=True)
class ClauseLayout:
    """Vertices of one clause gadget; position q holds the q-th literal.
    a_q and b_q are the endpoints of the marked edge of that literal."""

    z: int
    a: Tuple[int, int, int]
    b: Tuple[int, int, int]
    w: int = 0
    c: Tuple[int, ...] = ()
    d: Tuple[int, ...] = ()

    def marked_edges(self) -> List[Edge]:
        return [make_edge(self.a[q], self.b[q]) for q in range(3)]

    def cover_edges(self) -> List[Edge]:
        """The 18 unmarked edges of the cover gadget."""
        edges = []
        for q in range(3):
            a, b, c, d = self.a[q], self.b[q], self.c[q], self.d[q]
            edges += [make_edge(self.z, a), make_edge(self.z, c), make_edge(a, c),
                      make_edge(self.w, b), make_edge(self.w, d), make_edge(b, d)]
        return edges

    def matching_edges(self) -> List[Edge]:
        """The 3 unmarked edges of the matching gadget, all at z."""
        return [make_edge(self.z, self.a[q]) for q in range(3)]

    def completion(self, chosen: Sequence[int]) -> List[Edge]:
        """Six unmarked edges finishing a cover when the marked edges at
        the positions in chosen are already taken."""
        if not chosen:
            raise ReductionError("No marked edge of the clause is in the cover")
        edges = []
        for q in range(3):
            if q in chosen:
                edges += [make_edge(self.z, self.c[q]), make_edge(self.w, self.d[q])]
            else:
                edges += [make_edge(self.a[q], self.c[q]), make_edge(self.b[q], self.d[q])]
        return edges


@dataclass(frozen=True)
class GadgetInstance:
    """A generated temporal graph with its marks, threshold and layout."""

    graph: TemporalGraph
    marks: Mapping[Edge, int]
    threshold: int
    kind: GadgetKind
    cycles: Tuple[VariableCycle, ...] = ()
    clauses: Tuple[ClauseLayout, ...] = ()
    system: Optional[SetSystem] = None

    def marked_edges(self, mark: int) -> List[Edge]:
        return sorted(e for e, value in self.marks.items() if value == mark)


def _check_marks(marks: Sequence[int]):
    if len(marks) != 3 or 0 in marks or len({abs(x) for x in marks}) != 3:
        raise ReductionError(f"Clause gadgets need three distinct non-zero marks, got {marks}")


# Standalone gadget numbering: a/b pairs 1..6, then z, w, c's, d's.
_STANDALONE = ClauseLayout(z=7, a=(1, 3, 5), b=(2, 4, 6), w=8, c=(9, 10, 11), d=(12, 13, 14))


def build_clause_gadget_cover(j: int, k: int, l: int) -> GadgetInstance:
    """The 14-vertex clause gadget on its own, all edges at time 1."""
    _check_marks((j, k, l))
    layout = _STANDALONE
    marked = layout.marked_edges()
    labels = {e: {1} for e in marked + layout.cover_edges()}
    G = TemporalGraph.from_labels(14, 1, labels)
    marks = dict(zip(marked, (j, k, l)))
    return GadgetInstance(G, marks, 6, GadgetKind.CLAUSE_COVER, clauses=(layout,))


def build_clause_gadget_matching(j: int, k: int, l: int) -> GadgetInstance:
    """The 7-vertex clause gadget on its own, all edges at time 1."""
    _check_marks((j, k, l))
    layout = ClauseLayout(z=7, a=_STANDALONE.a, b=_STANDALONE.b)
    marked = layout.marked_edges()
    labels = {e: {1} for e in marked + layout.matching_edges()}
    G = TemporalGraph.from_labels(7, 1, labels)
    marks = dict(zip(marked, (j, k, l)))
    return GadgetInstance(G, marks, 1, GadgetKind.CLAUSE_MATCHING, clauses=(layout,))


def _occurrence_endpoints(F: Cnf22Formula, cycles: Sequence[VariableCycle]):
    """(a, b) per literal: the q-th positive occurrence of x_i takes the
    q-th +i edge in cycle order, likewise for negatives."""
    used = {(i, s): 0 for i in range(1, F.n + 1) for s in (1, -1)}
    endpoints = []
    for clause in F.clauses:
        row = []
        for lit in clause:
            i, sign = abs(lit), (1 if lit > 0 else -1)
            slots = POSITIVE_SLOTS if sign > 0 else NEGATIVE_SLOTS
            row.append(cycles[i - 1].endpoints(slots[used[(i, sign)]]))
            used[(i, sign)] += 1
        endpoints.append(row)
    return endpoints


def _sat_labels(F: Cnf22Formula, cycles) -> Tuple[Dict[Edge, set], Dict[Edge, int]]:
    labels: Dict[Edge, set] = {}
    marks: Dict[Edge, int] = {}
    for cycle in cycles:
        for edge, mark in cycle.marks.items():
            labels[edge] = {1, 2} if mark else {1}
            if mark:
                marks[edge] = mark
    return labels, marks


def reduce_sat_to_cover(F: Cnf22Formula) -> GadgetInstance:
    """Variable cycles at time 1, one cover gadget per clause at time 2,
    sharing the marked edges (time 1 and 2). Threshold 5n + 6m."""
    _require_valid(F)
    cycles = tuple(VariableCycle(i, CYCLE_LENGTH * (i - 1)) for i in range(1, F.n + 1))
    labels, marks = _sat_labels(F, cycles)
    layouts = []
    for p, row in enumerate(_occurrence_endpoints(F, cycles)):
        base = CYCLE_LENGTH * F.n + COVER_CLAUSE_VERTICES * p
        layout = ClauseLayout(z=base + 1, w=base + 2,
                              a=tuple(a for a, _ in row), b=tuple(b for _, b in row),
                              c=(base + 3, base + 4, base + 5), d=(base + 6, base + 7, base + 8))
        for edge in layout.cover_edges():
            labels[edge] = {2}
        layouts.append(layout)

    n = CYCLE_LENGTH * F.n + COVER_CLAUSE_VERTICES * F.m
    G = TemporalGraph.from_labels(n, 2, labels)
    logger.info("sat-cover: %d vertices, %d edges", n, len(G.edges))
    return GadgetInstance(G, marks, 5 * F.n + 6 * F.m, GadgetKind.SAT_COVER,
                          cycles, tuple(layouts))


def reduce_sat_to_matching(F: Cnf22Formula) -> GadgetInstance:
    """Variable cycles at time 1 and a matching gadget per clause whose
    three edges at z live at time 2. Threshold 5n + m."""
    _require_valid(F)
    cycles = tuple(VariableCycle(i, CYCLE_LENGTH * (i - 1)) for i in range(1, F.n + 1))
    labels, marks = _sat_labels(F, cycles)
    layouts = []
    for p, row in enumerate(_occurrence_endpoints(F, cycles)):
        layout = ClauseLayout(z=CYCLE_LENGTH * F.n + p + 1,
                              a=tuple(a for a, _ in row), b=tuple(b for _, b in row))
        for edge in layout.matching_edges():
            labels[edge] = {2}
        layouts.append(layout)

    G = TemporalGraph.from_labels(CYCLE_LENGTH * F.n + F.m, 2, labels)
    return GadgetInstance(G, marks, 5 * F.n + F.m, GadgetKind.SAT_MATCHING,
                          cycles, tuple(layouts))


def _true_positions(clause, sigma: Mapping[int, bool]) -> List[int]:
    return [q for q, lit in enumerate(clause) if sigma[abs(lit)] == (lit > 0)]


def _require_satisfying(F: Cnf22Formula, sigma: Mapping[int, bool]):
    missing = [i for i in range(1, F.n + 1) if i not in sigma]
    if missing:
        raise ReductionError(f"Assignment misses variables {missing}")
    if not F.satisfied_by(sigma):
        raise ReductionError("Assignment does not satisfy the formula")


def assignment_to_cover(F: Cnf22Formula, sigma: Mapping[int, bool]) -> SolutionSet:
    """Cover of exactly 5n + 6m edges from a satisfying assignment."""
    _require_satisfying(F, sigma)
    instance = reduce_sat_to_cover(F)
    edges = set()
    for cycle in instance.cycles:
        edges |= cycle.first_matching if sigma[cycle.i] else cycle.second_matching
    for clause, layout in zip(F.clauses, instance.clauses):
        edges.update(layout.completion(_true_positions(clause, sigma)))
    return SolutionSet(SolutionKind.COVER, frozenset(edges))


def assignment_to_matching(F: Cnf22Formula, sigma: Mapping[int, bool]) -> SolutionSet:
    """Matching of exactly 5n + m edges: a false variable keeps its +i
    edges, a true one its -i edges, and each clause adds the edge at z of
    its first true literal."""
    _require_satisfying(F, sigma)
    instance = reduce_sat_to_matching(F)
    edges = set()
    for cycle in instance.cycles:
        edges |= cycle.second_matching if sigma[cycle.i] else cycle.first_matching
    for clause, layout in zip(F.clauses, instance.clauses):
        q = _true_positions(clause, sigma)[0]
        edges.add(make_edge(layout.z, layout.a[q]))
    return SolutionSet(SolutionKind.MATCHING, frozenset(edges))


def cover_to_assignment(F: Cnf22Formula, instance: GadgetInstance,
                        cover: SolutionSet) -> Dict[int, bool]:
    """Read the assignment off a threshold-size cover: x_i is true iff the
    cover holds the perfect matching of L_i with both +i edges."""
    if not verify_edge_cover(instance.graph, cover).ok:
        raise ReductionError("Not a temporal edge cover of the instance")
    if cover.size > instance.threshold:
        raise ReductionError(f"Cover has {cover.size} edges, threshold is {instance.threshold}")
    sigma = {}
    for cycle in instance.cycles:
        inside = cover.edges & frozenset(cycle.edges)
        if inside == cycle.first_matching:
            sigma[cycle.i] = True
        elif inside == cycle.second_matching:
            sigma[cycle.i] = False
        else:
            raise ReductionError(f"Cover does not use a perfect matching of cycle {cycle.i}")
    if not F.satisfied_by(sigma):
        raise ReductionError("Recovered assignment does not satisfy the formula")
    return sigma


def matching_to_assignment(F: Cnf22Formula, instance: GadgetInstance,
                           matching: SolutionSet) -> Dict[int, bool]:
    """Read the assignment off a threshold-size matching: x_i is true iff
    both +i edges are absent."""
    if not verify_matching(instance.graph, matching).ok:
        raise ReductionError("Not a temporal matching of the instance")
    if matching.size < instance.threshold:
        raise ReductionError(f"Matching has {matching.size} edges, "
                             f"threshold is {instance.threshold}")
    sigma = {cycle.i: not (set(cycle.marked(1)) & matching.edges) for cycle in instance.cycles}
    if not F.satisfied_by(sigma):
        raise ReductionError("Recovered assignment does not satisfy the formula")
    return sigma


def _relabel(system: SetSystem) -> Tuple[int, List[FrozenSet[int]]]:
    """Map the universe onto 1..|U| in ascending order."""
    index = {x: i + 1 for i, x in enumerate(sorted(system.universe))}
    return len(index), [frozenset(index[x] for x in s) for s in system.sets]


def _require_nonempty_sets(system: SetSystem):
    for i, s in enumerate(system.sets):
        if not s:
            raise ReductionError(f"Set {i} is empty and cannot label an edge")


def _require_coverable(system: SetSystem):
    if not system.is_coverable():
        raise ReductionError("The sets do not cover the universe")
    if not system.universe:
        raise ReductionError("The universe is empty")


def spider_vertices(m: int, i: int) -> Tuple[int, int]:
    """(x_i, y_i) of the spider, i 0-based; the root is vertex 1."""
    return 2 + i, 2 + m + i


def reduce_setcover_to_tree_cover(system: SetSystem, k: int) -> GadgetInstance:
    """Spider r - x_i - y_i with the pendant edge at every time and the
    root edge at the times of S_i. Covers of at most k + m edges match set
    covers of at most k sets."""
    _require_coverable(system)
    _require_nonempty_sets(system)
    tau, sets = _relabel(system)
    universe = frozenset(range(1, tau + 1))
    labels = {}
    for i, s in enumerate(sets):
        x, y = spider_vertices(system.m, i)
        labels[(1, x)] = s
        labels[(x, y)] = universe
    G = TemporalGraph.from_labels(1 + 2 * system.m, tau, labels)
    return GadgetInstance(G, {}, k + system.m, GadgetKind.SETCOVER_TREE, system=system)


def setcover_to_tree_cover(instance: GadgetInstance, indices: Sequence[int]) -> SolutionSet:
    """Every pendant edge plus the root edges of the chosen sets."""
    system = instance.system
    if not system.covers(indices):
        raise ReductionError(f"Sets {sorted(indices)} do not cover the universe")
    edges = set()
    for i in range(system.m):
        x, y = spider_vertices(system.m, i)
        edges.add((x, y))
        if i in indices:
            edges.add((1, x))
    return SolutionSet(SolutionKind.COVER, frozenset(edges))


def tree_cover_to_setcover(instance: GadgetInstance, cover: SolutionSet) -> List[int]:
    """Sets whose root edge the cover uses."""
    if not verify_edge_cover(instance.graph, cover).ok:
        raise ReductionError("Not a temporal edge cover of the instance")
    if cover.size > instance.threshold:
        raise ReductionError(f"Cover has {cover.size} edges, threshold is {instance.threshold}")
    m = instance.system.m
    return [i for i in range(m) if (1, spider_vertices(m, i)[0]) in cover.edges]


def reduce_setpacking_to_star_matching(system: SetSystem, k: int) -> GadgetInstance:
    """Star with root edge r - x_i at the times of S_i; temporal matchings
    are exactly packings."""
    _require_nonempty_sets(system)
    tau, sets = _relabel(system)
    labels = {(1, 2 + i): s for i, s in enumerate(sets)}
    G = TemporalGraph.from_labels(1 + system.m, max(tau, 1), labels)
    return GadgetInstance(G, {}, k, GadgetKind.SETPACKING_STAR, system=system)


def packing_to_star_matching(instance: GadgetInstance, indices: Sequence[int]) -> SolutionSet:
    sets = instance.system.sets
    for a in indices:
        for b in indices:
            if a < b and sets[a] & sets[b]:
                raise ReductionError(f"Sets {a} and {b} intersect")
    return SolutionSet.of(SolutionKind.MATCHING, [(1, 2 + i) for i in indices])


def star_matching_to_packing(instance: GadgetInstance, matching: SolutionSet) -> List[int]:
    if not verify_matching(instance.graph, matching).ok:
        raise ReductionError("Not a temporal matching of the instance")
    if matching.size < instance.threshold:
        raise ReductionError(f"Matching has {matching.size} edges, "
                             f"threshold is {instance.threshold}")
    return sorted(v - 2 for _, v in matching.edges)


def inapprox_vertices(m: int) -> Tuple[range, range, range]:
    """Root copies, x's and y's of the inapproximability instance."""
    roots = range(1, m * m + 1)
    xs = range(m * m + 1, m * m + m + 1)
    ys = range(m * m + m + 1, m * m + 2 * m + 1)
    return roots, xs, ys


def reduce_setcover_inapprox(system: SetSystem, k: Optional[int] = None) -> GadgetInstance:
    """m^2 root copies, each joined to every x_j at the times of S_j, and
    pendants x_j - y_j at every time. Threshold m + k m^2; without k, the
    optimum (greedy size above EXACT_THRESHOLD_SETS sets)."""
    _require_coverable(system)
    _require_nonempty_sets(system)
    m = system.m
    if k is None:
        if m <= EXACT_THRESHOLD_SETS:
            k = len(exact_set_cover(system))
        else:
            k = len(greedy_set_cover(system))
    tau, sets = _relabel(system)
    universe = frozenset(range(1, tau + 1))
    roots, xs, ys = inapprox_vertices(m)
    labels = {}
    for r in roots:
        for j, x in enumerate(xs):
            labels[(r, x)] = sets[j]
    for x, y in zip(xs, ys):
        labels[(x, y)] = universe
    G = TemporalGraph.from_labels(m * m + 2 * m, tau, labels)
    return GadgetInstance(G, {}, m + k * m * m, GadgetKind.INAPPROX, system=system)


def setcover_to_inapprox_cover(instance: GadgetInstance, indices: Sequence[int]) -> SolutionSet:
    system = instance.system
    if not system.covers(indices):
        raise ReductionError(f"Sets {sorted(indices)} do not cover the universe")
    roots, xs, ys = inapprox_vertices(system.m)
    edges = [(x, y) for x, y in zip(xs, ys)]
    edges += [(r, xs[j]) for r in roots for j in indices]
    return SolutionSet.of(SolutionKind.COVER, edges)


def cover_to_setcover(instance: GadgetInstance, cover: SolutionSet) -> List[int]:
    """Set cover from the smallest group of root-copy edges (lowest root on
    ties); its size is (|cover| - m) / m^2 for a minimal cover."""
    if not verify_edge_cover(instance.graph, cover).ok:
        raise ReductionError("Not a temporal edge cover of the instance")
    m = instance.system.m
    roots, xs, _ = inapprox_vertices(m)
    groups = {r: sorted(x - xs[0] for u, x in cover.edges if u == r) for r in roots}
    best = min(roots, key=lambda r: (len(groups[r]), r))
    logger.debug("root copy %d uses %d sets", best, len(groups[best]))
    return groups[best]


def augment_labels(G: TemporalGraph) -> TemporalGraph:
    """Add time tau + 1 to every label."""
    late = G.tau + 1
    return TemporalGraph(G.base, late, {e: times | {late} for e, times in G.labels.items()})


def random_temporal_graph(n: int, p: float, tau: int, q: float, seed: int) -> TemporalGraph:
    """Each pair u < v (lexicographic order) is an edge with probability p;
    each time joins its label with probability q, redrawing empty labels."""
    if n < 0 or tau < 1 or not 0 <= p <= 1 or not 0 < q <= 1:
        raise ReductionError(f"Invalid parameters n={n} p={p} tau={tau} q={q}")
    rng = random.Random(seed)
    labels = {}
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if rng.random() >= p:
                continue
            times = set()
            while not times:
                times = {t for t in range(1, tau + 1) if rng.random() < q}
            labels[(u, v)] = times
    return TemporalGraph.from_labels(n, tau, labels)


def random_set_system(n: int, m: int, density: float, seed: int) -> SetSystem:
    """m non-empty subsets of 1..n that together cover it."""
    if n < 1 or m < 1 or not 0 < density <= 1:
        raise ReductionError(f"Invalid parameters n={n} m={m} density={density}")
    rng = random.Random(seed)
    sets = []
    for _ in range(m):
        s = set()
        while not s:
            s = {x for x in range(1, n + 1) if rng.random() < density}
        sets.append(s)
    for x in range(1, n + 1):
        if not any(x in s for s in sets):
            sets[rng.randrange(m)].add(x)
    return SetSystem.of(range(1, n + 1), sets)
