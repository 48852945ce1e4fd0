"""Tests for tree decomposition construction, validation and nice form."""

import os
import random
import sys
from itertools import permutations
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../src'))
sys.path.insert(0, os.path.dirname(__file__))

from fixtures import random_connected_graph
from temporal_graph import StaticGraph
from treedec import (BuildMode, DecompositionError, NiceTreeDecomposition, NodeKind,
                     TreeDecomposition, build_tree_decomposition, decomposition_from_ordering,
                     exact_elimination_ordering, to_nice, validate_decomposition,
                     validate_nice, width)


def brute_treewidth(H: StaticGraph) -> int:
    return min(width(decomposition_from_ordering(H, order))
               for order in permutations(H.vertices))


def complete_graph(n: int) -> StaticGraph:
    return StaticGraph.from_pairs(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])


def cycle(n: int) -> StaticGraph:
    return StaticGraph.from_pairs(n, [(i, i % n + 1) for i in range(1, n + 1)])


def test_construction():
    """Test widths of heuristic and exact decompositions."""
    print("=" * 60)
    print("Testing Decomposition Construction")
    print("=" * 60)

    # Test 1: known treewidths
    tree = StaticGraph.from_pairs(6, [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6)])
    for mode in BuildMode:
        D = build_tree_decomposition(tree, mode)
        assert validate_decomposition(tree, D).valid
        assert width(D) == 1
    assert width(build_tree_decomposition(cycle(5), BuildMode.EXACT)) == 2
    assert width(build_tree_decomposition(complete_graph(4))) == 3
    assert width(build_tree_decomposition(StaticGraph(3))) == 0
    print("✓ Test 1 passed: Tree, cycle, clique, edgeless")

    # Test 2: exact mode matches the best ordering
    rng = random.Random(3)
    for _ in range(25):
        H = random_connected_graph(rng, max_n=6)
        tw, order = exact_elimination_ordering(H, list(H.vertices))
        assert sorted(order) == list(H.vertices)
        assert width(decomposition_from_ordering(H, order)) == tw
        assert tw == brute_treewidth(H)
        D = build_tree_decomposition(H, BuildMode.EXACT)
        assert validate_decomposition(H, D).valid
        assert width(D) == tw
        assert width(build_tree_decomposition(H)) >= tw
    print("✓ Test 2 passed: Exact width on 25 random graphs")

    # Test 3: exact mode refuses large graphs
    try:
        build_tree_decomposition(cycle(13), BuildMode.EXACT)
        assert False, "exact mode accepted 13 vertices"
    except DecompositionError as e:
        assert "12" in str(e)
    print("✓ Test 3 passed: Exact size limit")

    # Test 4: components hang under an empty bag
    H = StaticGraph.from_pairs(5, [(1, 2), (3, 4)])
    for mode in BuildMode:
        D = build_tree_decomposition(H, mode)
        assert validate_decomposition(H, D).valid
        assert D.bags[D.root] == frozenset()
        assert len(D.children[D.root]) == 3
    print("✓ Test 4 passed: Disconnected graph")

    # Test 5: the empty graph has one empty bag
    D = build_tree_decomposition(StaticGraph(0))
    assert dict(D.bags) == {0: frozenset()}
    assert width(D) == 0
    print("✓ Test 5 passed: Empty graph")

    print()


def test_validation():
    """Test violation reports for broken decompositions."""
    print("=" * 60)
    print("Testing Decomposition Validation")
    print("=" * 60)

    path = StaticGraph.from_pairs(3, [(1, 2), (2, 3)])

    # Test 1: a valid decomposition
    D = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({2, 3})}, {0: (1,)}, 0)
    report = validate_decomposition(path, D)
    assert report.valid and report.width == 1 and not report.violations
    print("✓ Test 1 passed: Valid decomposition")

    # Test 2: missing vertex and edge
    D = TreeDecomposition({0: frozenset({1, 2})}, {}, 0)
    violations = validate_decomposition(path, D).violations
    assert "condition 1: vertex 3 appears in no bag" in violations
    assert "condition 2: edge 2-3 is in no bag" in violations
    D = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({3})}, {0: (1,)}, 0)
    assert validate_decomposition(path, D).violations == ["condition 2: edge 2-3 is in no bag"]
    print("✓ Test 2 passed: Conditions 1 and 2")

    # Test 3: disconnected occurrences of a vertex
    D = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({2, 3}), 2: frozenset({1})},
                          {0: (1,), 1: (2,)}, 0)
    report = validate_decomposition(path, D)
    assert not report.valid
    assert report.violations == ["condition 3: nodes containing vertex 1 are not connected"]
    print("✓ Test 3 passed: Condition 3")

    # Test 4: broken tree shape
    D = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({2, 3})}, {}, 0)
    assert any(v.startswith("structure:") for v in validate_decomposition(path, D).violations)
    D = TreeDecomposition({0: frozenset({1, 2, 3})}, {0: (7,)}, 0)
    assert any("child 7" in v for v in validate_decomposition(path, D).violations)
    print("✓ Test 4 passed: Structure")

    print()


def test_nice():
    """Test conversion to nice form."""
    print("=" * 60)
    print("Testing Nice Decompositions")
    print("=" * 60)

    # Test 1: nice form is valid and keeps the width
    rng = random.Random(5)
    graphs = [random_connected_graph(rng) for _ in range(30)]
    graphs += [StaticGraph.from_pairs(5, [(1, 2), (3, 4)]), StaticGraph(1), complete_graph(4)]
    for H in graphs:
        D = build_tree_decomposition(H)
        nice = to_nice(D)
        report = validate_nice(H, nice)
        assert report.valid, report.violations
        assert width(nice) == width(D)
        assert nice.bags[nice.root] == frozenset()
    print("✓ Test 1 passed: 33 graphs")

    # Test 2: node shapes
    H = StaticGraph.from_pairs(3, [(1, 2), (2, 3)])
    D = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({2, 3}), 2: frozenset({2})},
                          {0: (1, 2)}, 0)
    nice = to_nice(D)
    assert validate_nice(H, nice).valid
    kinds = [nice.kind(node) for node in nice.post_order()]
    assert kinds[0] == NodeKind.LEAF
    assert kinds.count(NodeKind.JOIN) == 1
    assert kinds.count(NodeKind.FORGET) == 3
    for node in nice.post_order():
        if nice.kind(node) == NodeKind.JOIN:
            left, right = nice.children[node]
            assert nice.bags[left] == nice.bags[right] == nice.bags[node] == frozenset({1, 2})
    print("✓ Test 2 passed: Leaf, introduce, forget and join nodes")

    # Test 3: invalid input and non-nice decompositions
    broken = TreeDecomposition({0: frozenset({1, 2}), 1: frozenset({2, 3}), 2: frozenset({1})},
                               {0: (1,), 1: (2,)}, 0)
    try:
        to_nice(broken)
        assert False, "broken decomposition converted"
    except DecompositionError as e:
        assert "condition 3" in str(e)
    plain = build_tree_decomposition(H)
    assert not validate_nice(H, plain).valid
    print("✓ Test 3 passed: Rejections")

    # Test 4: kinds recovered from bag differences
    bags = {0: frozenset(), 1: frozenset({1}), 2: frozenset()}
    kinds = {0: NodeKind.LEAF, 1: NodeKind.INTRODUCE, 2: NodeKind.FORGET}
    nice = NiceTreeDecomposition.from_parts(bags, {1: [0], 2: [1]}, 2, kinds)
    assert nice.vertex == {1: 1, 2: 1}
    assert validate_nice(StaticGraph(1), nice).valid
    mislabelled = NiceTreeDecomposition.from_parts(bags, {1: [0], 2: [1]}, 2,
                                                   {0: NodeKind.LEAF, 1: NodeKind.INTRODUCE,
                                                    2: NodeKind.INTRODUCE})
    assert not validate_nice(StaticGraph(1), mislabelled).valid
    try:
        NiceTreeDecomposition.from_parts({0: frozenset(), 1: frozenset({1, 2})}, {1: [0]}, 1,
                                         {0: NodeKind.LEAF, 1: NodeKind.INTRODUCE})
        assert False, "two-vertex introduce accepted"
    except DecompositionError:
        pass
    print("✓ Test 4 passed: Rebuilt from parts")

    print()


def run_all_tests():
    """Run all tests."""
    print("\n")
    print("╔" + "=" * 58 + "╗")
    print("║" + " tempoc tree decompositions - Test Suite ".center(58) + "║")
    print("╚" + "=" * 58 + "╝")
    print()

    try:
        test_construction()
        test_validation()
        test_nice()

        print("=" * 60)
        print("All Tests Passed! ✓")
        print("=" * 60)
        print()

    except AssertionError as e:
        print(f"\n✗ Test failed: {e}")
        return False

    return True


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
