"""Tests for the temporal graph model, the record lexer and the file formats."""

import glob
import os
import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../src'))
sys.path.insert(0, os.path.dirname(__file__))

from fixtures import INSTANCES, k2, path3, three_star, two_leaf_star
from formats import (ParseError, parse_cnf, parse_decomposition, parse_marks,
                     parse_set_system, parse_solution, parse_temporal_graph,
                     serialize_cnf, serialize_decomposition, serialize_marks,
                     serialize_set_system, serialize_solution, serialize_temporal_graph)
from lexer import Lexer
from temporal_graph import (GraphError, SolutionKind, SolutionSet, StaticGraph, TemporalGraph,
                            TemporalVertex, coverable_universe, edges_conflict, is_isolated,
                            make_edge, snapshot, verify_edge_cover, verify_matching)
from token_types import TokenType
from treedec import NodeKind, build_tree_decomposition, to_nice


def expect_error(error_type, action, fragment=""):
    """Run action and check that it raises error_type mentioning fragment."""
    try:
        action()
    except error_type as e:
        assert fragment in str(e), f"'{fragment}' not in '{e}'"
        return
    raise AssertionError(f"{error_type.__name__} not raised")


def test_lexer():
    """Test record lexer."""
    print("=" * 60)
    print("Testing Lexer")
    print("=" * 60)

    # Test 1: header and edge records
    tokens = Lexer("p tgraph 2 1 2\ne 1 2 1,2\n").tokenize()
    assert [t.type for t in tokens] == [TokenType.PROBLEM, TokenType.EDGE, TokenType.EOF]
    assert tokens[1].fields == ['1', '2', '1,2']
    assert tokens[1].line == 2
    print("✓ Test 1 passed: Header and edge records")

    # Test 2: comments and blank lines are skipped, line numbers kept
    tokens = Lexer("# note\n\nc dimacs comment\ne 1 2 1\n").tokenize()
    assert tokens[0].type == TokenType.EDGE
    assert tokens[0].line == 4
    print("✓ Test 2 passed: Comment handling")

    # Test 3: DIMACS clause lines
    tokens = Lexer("p cnf 3 1\n1 -2 3 0\n").tokenize()
    assert tokens[1].type == TokenType.CLAUSE
    assert tokens[1].fields == ['1', '-2', '3', '0']
    print("✓ Test 3 passed: Clause records")

    # Test 4: unknown keywords are reported with their line
    lexer = Lexer("p tgraph 1 0 1\nx 1 2\n")
    lexer.tokenize()
    assert lexer.has_errors()
    assert lexer.get_errors()[0].startswith("Line 2:")
    print("✓ Test 4 passed: Unknown keyword error")

    print()


def test_temporal_graph():
    """Test graph construction, snapshots and the coverable universe."""
    print("=" * 60)
    print("Testing Temporal Graph")
    print("=" * 60)

    # Test 1: canonical edges and sorted adjacency
    H = StaticGraph.from_pairs(3, [(2, 1), (3, 2)])
    assert H.sorted_edges == ((1, 2), (2, 3))
    assert H.adjacency[2] == (1, 3)
    assert H.edges_within([1, 2]) == ((1, 2),)
    print("✓ Test 1 passed: Static graph")

    # Test 2: snapshots keep every vertex and the active edges
    G = two_leaf_star()
    assert snapshot(G, 1).edges == frozenset({(1, 2)})
    assert snapshot(G, 2).edges == frozenset({(1, 3)})
    assert snapshot(G, 2).n == 3
    expect_error(GraphError, lambda: snapshot(G, 3), "outside")
    print("✓ Test 2 passed: Snapshots")

    # Test 3: isolated temporal vertices are not coverable
    G = TemporalGraph.from_labels(2, 2, {(1, 2): {1}})
    assert is_isolated(G, 1, 2)
    assert not is_isolated(G, 1, 1)
    expect_error(GraphError, lambda: is_isolated(G, 1, 99), "Time 99 outside")
    expect_error(GraphError, lambda: is_isolated(G, 9, 1), "Vertex 9 outside")
    assert coverable_universe(G) == {TemporalVertex(1, 1), TemporalVertex(2, 1)}
    print("✓ Test 3 passed: Coverable universe")

    # Test 4: invalid constructions
    expect_error(GraphError, lambda: make_edge(2, 2), "Self-loop")
    expect_error(GraphError, lambda: TemporalGraph.from_labels(2, 1, {(1, 2): set()}), "empty")
    expect_error(GraphError, lambda: TemporalGraph.from_labels(2, 1, {(1, 2): {2}}), "outside")
    expect_error(GraphError, lambda: TemporalGraph.from_labels(2, 1, {(1, 3): {1}}), "outside")
    expect_error(GraphError, lambda: k2().label((1, 3)), "not in the graph")
    print("✓ Test 4 passed: Construction errors")

    print()


def test_verification():
    """Test cover and matching verification."""
    print("=" * 60)
    print("Testing Verification")
    print("=" * 60)

    # Test 1: a one-edge set does not cover the path
    G = path3()
    report = verify_edge_cover(G, SolutionSet.of(SolutionKind.COVER, [(1, 2)]))
    assert not report.ok
    assert report.uncovered == [TemporalVertex(3, 1)]
    assert verify_edge_cover(G, SolutionSet.of(SolutionKind.COVER, [(1, 2), (2, 3)])).ok
    print("✓ Test 1 passed: Cover verification")

    # Test 2: the empty set covers a graph without coverable vertices
    G = TemporalGraph(StaticGraph(2), 1, {})
    assert verify_edge_cover(G, SolutionSet(SolutionKind.COVER)).ok
    print("✓ Test 2 passed: Empty universe")

    # Test 3: edges conflict iff they share a vertex and a time
    G = three_star()
    assert edges_conflict(G, (1, 2), (1, 3))
    assert not edges_conflict(G, (1, 2), (1, 4))
    report = verify_matching(G, SolutionSet.of(SolutionKind.MATCHING, G.edges))
    assert not report.ok
    assert report.conflicts == [((1, 2), (1, 3))]
    assert verify_matching(G, SolutionSet.of(SolutionKind.MATCHING, [(1, 2), (1, 4)])).ok
    print("✓ Test 3 passed: Matching verification")

    # Test 4: solutions must use graph edges
    expect_error(GraphError, lambda: verify_matching(G, SolutionSet.of(SolutionKind.MATCHING,
                                                                         [(2, 3)])), "not in the graph")
    print("✓ Test 4 passed: Foreign edge")

    print()


def test_instance_format():
    """Test instance parsing and canonical serialization."""
    print("=" * 60)
    print("Testing Instance Format")
    print("=" * 60)

    # Test 1: pairs are normalized and output is canonical
    G = parse_temporal_graph("p tgraph 3 2 2\ne 3 2 2,1\ne 2 1 1\n")
    assert G.edges == ((1, 2), (2, 3))
    assert G.label((2, 3)) == {1, 2}
    assert serialize_temporal_graph(G) == "p tgraph 3 2 2\ne 1 2 1\ne 2 3 1,2\n"
    print("✓ Test 1 passed: Canonical serialization")

    # Test 2: malformed inputs name their line
    cases = [
        ("p tgraph 2 1 1\ne 1 2 1\ne 2 1 1\n", "Line 3: duplicate edge"),
        ("p tgraph 2 1 1\ne 1 2 2\n", "Line 2: label 2 out of range"),
        ("p tgraph 2 1 2\ne 1 2 1,1\n", "repeats a time"),
        ("p tgraph 2 1 1\ne 1 3 1\n", "vertex 3 out of range"),
        ("p tgraph 2 1 1\ne 1 1 1\n", "self-loop"),
        ("p tgraph 2 2 1\ne 1 2 1\n", "announces 2 edges"),
        ("p tgraph 2 1 1\ne 1 2 -\n", "empty label set"),
        ("p tgraph 2 1 1\ne 1 2 x\n", "not an integer"),
        ("e 1 2 1\n", "expected header"),
        ("p tgraph 2 0 1\nz\n", "unknown record keyword"),
    ]
    for text, fragment in cases:
        expect_error(ParseError, lambda: parse_temporal_graph(text), fragment)
    print("✓ Test 2 passed: Instance parse errors")

    # Test 3: every bundled instance survives a round trip
    paths = sorted(glob.glob(os.path.join(INSTANCES, '*.tg')))
    assert len(paths) >= 7
    for path in paths:
        with open(path) as f:
            G = parse_temporal_graph(f.read())
        assert parse_temporal_graph(serialize_temporal_graph(G)) == G
    print("✓ Test 3 passed: Corpus round trip")

    print()


def test_other_formats():
    """Test solution, set-system, decomposition, marks and CNF files."""
    print("=" * 60)
    print("Testing Other Formats")
    print("=" * 60)

    # Test 1: solutions
    S = parse_solution("s cover 2\ne 2 1\ne 2 3\n")
    assert S.kind == SolutionKind.COVER
    assert S.edges == {(1, 2), (2, 3)}
    assert serialize_solution(S) == "s cover 2\ne 1 2\ne 2 3\n"
    expect_error(ParseError, lambda: parse_solution("s cover 1\n"), "announces 1 edges")
    expect_error(ParseError, lambda: parse_solution("s packing 0\n"), "unknown solution kind")
    print("✓ Test 1 passed: Solution files")

    # Test 2: set systems, including an empty set
    system = parse_set_system("p setsys 3 3\ns 1,2\ns\ns 3\n")
    assert system.universe == {1, 2, 3}
    assert system.sets == (frozenset({1, 2}), frozenset(), frozenset({3}))
    assert serialize_set_system(system) == "p setsys 3 3\ns 1,2\ns\ns 3\n"
    expect_error(ParseError, lambda: parse_set_system("p setsys 2 1\ns 3\n"), "out of range")
    print("✓ Test 2 passed: Set-system files")

    # Test 3: nice decompositions come back with their kinds
    nice = to_nice(build_tree_decomposition(path3().base))
    restored = parse_decomposition(serialize_decomposition(nice))
    assert restored.bags == nice.bags
    assert all(restored.kind(n) == nice.kind(n) for n in nice.bags)
    assert restored.vertex == nice.vertex
    assert restored.root == nice.root
    print("✓ Test 3 passed: Nice decomposition files")

    # Test 4: plain bags and structural errors
    D = parse_decomposition("b 0 bag 1,2\nb 1 bag 2,3\nt 0 1\n")
    assert D.kind(0) == NodeKind.BAG
    assert D.children[0] == (1,)
    expect_error(ParseError, lambda: parse_decomposition("b 0 bag 1\nb 1 bag 2\n"), "one root")
    expect_error(ParseError, lambda: parse_decomposition("b 0 leaf -\nt 0 5\n"), "unknown node 5")
    print("✓ Test 4 passed: Plain decomposition files")

    # Test 5: gadget sidecars write only marked edges
    text = serialize_marks('sat-cover', 39, {(1, 2): 1, (2, 3): 0, (6, 7): -1})
    assert text == "g sat-cover 39\nm 1 2 1\nm 6 7 -1\n"
    assert parse_marks(text) == ('sat-cover', 39, {(1, 2): 1, (6, 7): -1})
    print("✓ Test 5 passed: Marks sidecar")

    # Test 6: DIMACS formulas
    with open(os.path.join(INSTANCES, 'sat22-n3m4.cnf')) as f:
        n, clauses = parse_cnf(f.read())
    assert n == 3
    assert clauses == [(1, 2, 3), (1, 2, 3), (-1, -2, -3), (-1, -2, -3)]
    assert parse_cnf(serialize_cnf(n, clauses)) == (n, clauses)
    expect_error(ParseError, lambda: parse_cnf("p cnf 2 1\n1 3 0\n"), "out of range")
    expect_error(ParseError, lambda: parse_cnf("p cnf 2 1\n1 2\n"), "not terminated")
    print("✓ Test 6 passed: CNF files")

    print()


def run_all_tests():
    """Run all tests."""
    print("\n")
    print("╔" + "=" * 58 + "╗")
    print("║" + " tempoc core - Test Suite ".center(58) + "║")
    print("╚" + "=" * 58 + "╝")
    print()

    try:
        test_lexer()
        test_temporal_graph()
        test_verification()
        test_instance_format()
        test_other_formats()

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
