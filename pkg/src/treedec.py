"""Tree decompositions: construction, validation and nice form."""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from config import EXACT_TREEWIDTH_LIMIT
from temporal_graph import StaticGraph

logger = logging.getLogger(__name__)

EMPTY_BAG: FrozenSet[int] = frozenset()


class DecompositionError(Exception):
    """Raised for invalid decompositions and refused constructions."""
    pass


class NodeKind(Enum):
    """Node types; BAG marks a node of a decomposition that is not nice."""
    BAG = 'bag'
    LEAF = 'leaf'
    INTRODUCE = 'introduce'
    FORGET = 'forget'
    JOIN = 'join'


class BuildMode(Enum):
    HEURISTIC = 'heuristic'
    EXACT = 'exact'


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags. Children are ordered."""

    bags: Mapping[int, FrozenSet[int]]
    children: Mapping[int, Tuple[int, ...]]
    root: int

    @cached_property
    def parent(self) -> Dict[int, Optional[int]]:
        parent: Dict[int, Optional[int]] = {node: None for node in self.bags}
        for node, kids in self.children.items():
            for child in kids:
                parent[child] = node
        return parent

    def kind(self, node: int) -> NodeKind:
        return NodeKind.BAG

    def post_order(self) -> List[int]:
        """Nodes reachable from the root, children before parents."""
        order: List[int] = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            stack.append((node, True))
            for child in reversed(self.children.get(node, ())):
                stack.append((child, False))
        return order

    def subtree_vertices(self, node: int) -> FrozenSet[int]:
        """Union of the bags in the subtree rooted at node."""
        vertices = set()
        stack = [node]
        while stack:
            current = stack.pop()
            vertices |= self.bags[current]
            stack.extend(self.children.get(current, ()))
        return frozenset(vertices)


@dataclass(frozen=True)
class NiceTreeDecomposition(TreeDecomposition):
    """Decomposition whose nodes are leaf, introduce, forget or join."""

    kinds: Mapping[int, NodeKind] = field(default_factory=dict)
    vertex: Mapping[int, int] = field(default_factory=dict)

    def kind(self, node: int) -> NodeKind:
        return self.kinds[node]

    @classmethod
    def from_parts(cls, bags, children, root, kinds) -> 'NiceTreeDecomposition':
        """Rebuild a nice decomposition from a dump; the introduced or
        forgotten vertex is recovered from the bag difference."""
        vertex: Dict[int, int] = {}
        for node, kind in kinds.items():
            kids = children.get(node, [])
            if kind in (NodeKind.INTRODUCE, NodeKind.FORGET):
                if len(kids) != 1:
                    raise DecompositionError(f"Node {node} ({kind.value}) needs one child")
                diff = bags[node] ^ bags[kids[0]]
                if len(diff) != 1:
                    raise DecompositionError(f"Node {node} ({kind.value}) must change one vertex")
                vertex[node] = next(iter(diff))
        return cls(bags, {n: tuple(cs) for n, cs in children.items()}, root, kinds, vertex)


@dataclass
class DecompositionReport:
    """Violations found by validation, one message per problem."""
    valid: bool
    width: int
    violations: List[str] = field(default_factory=list)


def width(D: TreeDecomposition) -> int:
    """Size of the largest bag minus one; 0 for the single empty bag."""
    return max(0, max((len(bag) for bag in D.bags.values()), default=0) - 1)


def _structure_violations(D: TreeDecomposition) -> List[str]:
    violations = []
    if D.root not in D.bags:
        return [f"structure: root {D.root} has no bag"]
    seen = set()
    stack = [D.root]
    while stack:
        node = stack.pop()
        if node in seen:
            violations.append(f"structure: node {node} is reached twice (not a tree)")
            continue
        seen.add(node)
        for child in D.children.get(node, ()):
            if child not in D.bags:
                violations.append(f"structure: child {child} of node {node} has no bag")
            else:
                stack.append(child)
    unreachable = sorted(set(D.bags) - seen)
    if unreachable:
        violations.append(f"structure: nodes {unreachable} are not reachable from the root")
    return violations


def _connectivity_violations(D: TreeDecomposition) -> List[str]:
    # A vertex's nodes are connected iff exactly one of them has a parent
    # whose bag misses the vertex.
    tops: Dict[int, int] = {}
    for node in D.post_order():
        parent = D.parent[node]
        for v in D.bags[node]:
            if parent is None or v not in D.bags[parent]:
                tops[v] = tops.get(v, 0) + 1
    return [f"condition 3: nodes containing vertex {v} are not connected"
            for v, count in sorted(tops.items()) if count > 1]


def validate_decomposition(H: StaticGraph, D: TreeDecomposition) -> DecompositionReport:
    """Check the tree shape and the three decomposition conditions."""
    violations = _structure_violations(D)
    if violations:
        return DecompositionReport(False, width(D), violations)

    in_bags = frozenset().union(*D.bags.values())
    for v in sorted(in_bags - set(H.vertices)):
        violations.append(f"structure: bag vertex {v} is not a vertex of the graph")
    for v in H.vertices:
        if v not in in_bags:
            violations.append(f"condition 1: vertex {v} appears in no bag")
    for u, v in H.sorted_edges:
        if not any(u in bag and v in bag for bag in D.bags.values()):
            violations.append(f"condition 2: edge {u}-{v} is in no bag")
    violations += _connectivity_violations(D)

    return DecompositionReport(not violations, width(D), violations)


def validate_nice(H: StaticGraph, D: TreeDecomposition) -> DecompositionReport:
    """validate_decomposition plus the nice-form structural rules."""
    report = validate_decomposition(H, D)
    violations = report.violations
    if not isinstance(D, NiceTreeDecomposition):
        violations.append("nice: decomposition carries no node kinds")
        return DecompositionReport(False, report.width, violations)

    if D.bags[D.root]:
        violations.append("nice: root bag is not empty")
    forgotten: Dict[int, int] = {}
    for node in D.bags:
        kind, bag, kids = D.kind(node), D.bags[node], D.children.get(node, ())
        if kind == NodeKind.LEAF:
            if kids or bag:
                violations.append(f"nice: leaf {node} must be childless with an empty bag")
        elif kind == NodeKind.JOIN:
            if len(kids) != 2 or any(D.bags[c] != bag for c in kids):
                violations.append(f"nice: join {node} needs two children with its bag")
        elif kind in (NodeKind.INTRODUCE, NodeKind.FORGET):
            v = D.vertex.get(node)
            if len(kids) != 1:
                violations.append(f"nice: {kind.value} {node} needs one child")
                continue
            child_bag = D.bags[kids[0]]
            expected = child_bag | {v} if kind == NodeKind.INTRODUCE else child_bag - {v}
            changed = v not in child_bag if kind == NodeKind.INTRODUCE else v in child_bag
            if bag != expected or not changed:
                violations.append(f"nice: {kind.value} {node} does not change exactly vertex {v}")
            if kind == NodeKind.FORGET:
                forgotten[v] = forgotten.get(v, 0) + 1
        else:
            violations.append(f"nice: node {node} has kind {kind.value}")
    for v in H.vertices:
        if forgotten.get(v, 0) != 1:
            violations.append(f"nice: vertex {v} is forgotten {forgotten.get(v, 0)} times")

    return DecompositionReport(not violations, report.width, violations)


def _combine(parts: List[Tuple[Dict, Dict, int]]) -> TreeDecomposition:
    """Join per-component decompositions under an empty-bag root."""
    bags: Dict[int, FrozenSet[int]] = {}
    children: Dict[int, Tuple[int, ...]] = {}
    for part_bags, part_children, _ in parts:
        bags.update(part_bags)
        children.update(part_children)
    if len(parts) == 1:
        return TreeDecomposition(bags, children, parts[0][2])
    spine = max(bags, default=-1) + 1
    bags[spine] = EMPTY_BAG
    children[spine] = tuple(root for _, _, root in parts)
    return TreeDecomposition(bags, children, spine)


def decomposition_from_ordering(H: StaticGraph, order: Sequence[int]) -> TreeDecomposition:
    """Decomposition induced by eliminating vertices in the given order.
    Node i holds the i-th eliminated vertex and its later neighbours."""
    if sorted(order) != list(H.vertices):
        raise DecompositionError("Elimination order must list every vertex once")
    if not order:
        return TreeDecomposition({0: EMPTY_BAG}, {0: ()}, 0)

    position = {v: i for i, v in enumerate(order)}
    adjacency = {v: set(H.adjacency[v]) for v in H.vertices}
    bags: Dict[int, FrozenSet[int]] = {}
    children: Dict[int, List[int]] = {i: [] for i in range(len(order))}
    roots: List[int] = []

    for i, v in enumerate(order):
        later = {w for w in adjacency[v] if position[w] > i}
        bags[i] = frozenset(later | {v})
        for a, b in combinations(later, 2):
            adjacency[a].add(b)
            adjacency[b].add(a)
        if later:
            children[min(position[w] for w in later)].append(i)
        else:
            roots.append(i)

    kids = {node: tuple(cs) for node, cs in children.items()}
    if len(roots) == 1:
        return TreeDecomposition(bags, kids, roots[0])
    spine = len(order)
    bags[spine] = EMPTY_BAG
    kids[spine] = tuple(roots)
    return TreeDecomposition(bags, kids, spine)


def _outside_reach(adj: List[int], inner: int, v: int) -> int:
    """Number of vertices outside inner + {v} reachable from v through inner."""
    seen = 1 << v
    reached = 0
    queue = deque([v])
    while queue:
        current = queue.popleft()
        nbrs = adj[current] & ~seen
        seen |= nbrs
        reached |= nbrs & ~inner
        through = nbrs & inner
        while through:
            low = through & -through
            queue.append(low.bit_length() - 1)
            through ^= low
    return bin(reached).count('1')


def exact_elimination_ordering(H: StaticGraph, vertices: Sequence[int]) -> Tuple[int, List[int]]:
    """Optimal elimination ordering of one vertex set by the subset
    recurrence TW(S) = min_v max(TW(S - v), |Q(S - v, v)|)."""
    k = len(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    adj = [0] * k
    for v in vertices:
        for w in H.adjacency[v]:
            if w in index:
                adj[index[v]] |= 1 << index[w]

    best = [0] * (1 << k)
    last = [0] * (1 << k)
    best[0] = -1
    for S in range(1, 1 << k):
        value = None
        rest = S
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            candidate = max(best[S ^ low], _outside_reach(adj, S ^ low, v))
            if value is None or candidate < value:
                value, last[S] = candidate, v
            rest ^= low
        best[S] = value

    order: List[int] = []
    S = (1 << k) - 1
    while S:
        v = last[S]
        order.append(vertices[v])
        S ^= 1 << v
    order.reverse()
    return max(best[(1 << k) - 1], 0), order


def _from_networkx(decomp: nx.Graph, offset: int) -> Tuple[Dict, Dict, int]:
    """Root a networkx bag tree at its smallest bag and number nodes in BFS order."""
    def key(bag):
        return (len(bag), sorted(bag))

    root_bag = min(decomp.nodes, key=key)
    ids = {root_bag: offset}
    bags = {offset: frozenset(root_bag)}
    children: Dict[int, Tuple[int, ...]] = {}
    queue = deque([root_bag])
    while queue:
        bag = queue.popleft()
        kids = []
        for nbr in sorted((b for b in decomp[bag] if b not in ids), key=key):
            ids[nbr] = offset + len(ids)
            bags[ids[nbr]] = frozenset(nbr)
            kids.append(ids[nbr])
            queue.append(nbr)
        children[ids[bag]] = tuple(kids)
    return bags, children, offset


def build_tree_decomposition(H: StaticGraph, mode: BuildMode = BuildMode.HEURISTIC) -> TreeDecomposition:
    """Decompose every connected component and join them under an empty bag.

    Args:
        H: Graph to decompose
        mode: HEURISTIC (min-fill elimination) or EXACT (optimal, n <= 12)

    Returns:
        A valid tree decomposition of H
    """
    mode = BuildMode(mode)
    if H.n == 0:
        return TreeDecomposition({0: EMPTY_BAG}, {0: ()}, 0)

    if mode == BuildMode.EXACT:
        if H.n > EXACT_TREEWIDTH_LIMIT:
            raise DecompositionError(f"Exact treewidth is limited to {EXACT_TREEWIDTH_LIMIT} "
                                     f"vertices, got {H.n}")
        order: List[int] = []
        tw = 0
        for component in _components(H):
            w, part = exact_elimination_ordering(H, component)
            tw = max(tw, w)
            order += part
        D = decomposition_from_ordering(H, order)
        logger.info("exact decomposition of width %d", tw)
        return D

    graph = nx.Graph()
    graph.add_nodes_from(H.vertices)
    graph.add_edges_from(H.sorted_edges)
    parts = []
    offset = 0
    for component in _components(H):
        _, decomp = treewidth_min_fill_in(graph.subgraph(component))
        part = _from_networkx(decomp, offset)
        parts.append(part)
        offset += len(part[0])
    D = _combine(parts)
    logger.info("min-fill decomposition of width %d over %d components", width(D), len(parts))
    return D


def _components(H: StaticGraph) -> List[List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(H.vertices)
    graph.add_edges_from(H.sorted_edges)
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


class _NiceBuilder:
    """Accumulates nice nodes; ids are handed out children first."""

    def __init__(self):
        self.bags: Dict[int, FrozenSet[int]] = {}
        self.children: Dict[int, Tuple[int, ...]] = {}
        self.kinds: Dict[int, NodeKind] = {}
        self.vertex: Dict[int, int] = {}

    def add(self, kind: NodeKind, bag: FrozenSet[int], kids: Tuple[int, ...],
            v: Optional[int] = None) -> int:
        node = len(self.bags)
        self.bags[node] = bag
        self.children[node] = kids
        self.kinds[node] = kind
        if v is not None:
            self.vertex[node] = v
        return node

    def chain(self, node: int, source: FrozenSet[int], target: FrozenSet[int]) -> int:
        """Forget source - target, then introduce target - source, ascending."""
        bag = source
        for v in sorted(source - target):
            bag = bag - {v}
            node = self.add(NodeKind.FORGET, bag, (node,), v)
        for v in sorted(target - source):
            bag = bag | {v}
            node = self.add(NodeKind.INTRODUCE, bag, (node,), v)
        return node

    def build(self, root: int) -> NiceTreeDecomposition:
        return NiceTreeDecomposition(self.bags, self.children, root, self.kinds, self.vertex)


def to_nice(D: TreeDecomposition) -> NiceTreeDecomposition:
    """Nice decomposition of the same width with empty leaf and root bags."""
    violations = _structure_violations(D)
    if not violations:
        violations = _connectivity_violations(D)
    if violations:
        raise DecompositionError("Invalid decomposition: " + "; ".join(violations))

    builder = _NiceBuilder()
    top: Dict[int, int] = {}
    for t in D.post_order():
        bag = D.bags[t]
        branches = [builder.chain(top[c], D.bags[c], bag) for c in D.children.get(t, ())]
        if not branches:
            leaf = builder.add(NodeKind.LEAF, EMPTY_BAG, ())
            branches.append(builder.chain(leaf, EMPTY_BAG, bag))
        joined = branches[0]
        for branch in branches[1:]:
            joined = builder.add(NodeKind.JOIN, bag, (joined, branch))
        top[t] = joined

    root = builder.chain(top[D.root], D.bags[D.root], EMPTY_BAG)
    nice = builder.build(root)
    logger.debug("nice decomposition: %d nodes from %d bags", len(nice.bags), len(D.bags))
    return nice
