"""Tests for the greedy cover and snapshot matching approximations."""

import os
import sys
from fractions import Fraction
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../src'))
sys.path.insert(0, os.path.dirname(__file__))

from approx import greedy_temporal_edge_cover, snapshot_matching_approx
from exact import brute_max_matching, brute_min_edge_cover
from fixtures import corpus_path, edgeless, k2, random_instances, tau_star
from formats import parse_temporal_graph
from static_alg import harmonic, is_static_matching
from temporal_graph import snapshot, verify_edge_cover, verify_matching


def test_greedy_cover():
    """Test the greedy temporal edge cover."""
    print("=" * 60)
    print("Testing Greedy Edge Cover")
    print("=" * 60)

    # Test 1: single edge
    report = greedy_temporal_edge_cover(k2())
    assert report.size == 1
    assert report.bound_factor == 3
    assert report.per_step == [(1, 1)]
    print("✓ Test 1 passed: K2")

    # Test 2: per-vertex steps on the spider
    with open(corpus_path('spider.tg')) as f:
        G = parse_temporal_graph(f.read())
    report = greedy_temporal_edge_cover(G)
    assert verify_edge_cover(G, report.solution).ok
    assert report.size == 4
    assert report.per_step == [(1, 2), (2, 1), (3, 1)]
    assert report.size <= report.bound_factor * brute_min_edge_cover(G)[0]
    print("✓ Test 2 passed: Spider")

    # Test 3: within 2 H(tau) of the optimum on random instances
    for G in random_instances(150, seed=21):
        report = greedy_temporal_edge_cover(G)
        assert verify_edge_cover(G, report.solution).ok
        assert report.bound_factor == 2 * harmonic(G.tau)
        assert report.size <= report.bound_factor * brute_min_edge_cover(G)[0]
    print("✓ Test 3 passed: 150 random instances")

    # Test 4: nothing to cover
    report = greedy_temporal_edge_cover(edgeless())
    assert report.size == 0 and report.per_step == []
    print("✓ Test 4 passed: Edgeless graph")

    print()


def test_snapshot_matching():
    """Test the best-snapshot matching."""
    print("=" * 60)
    print("Testing Snapshot Matching")
    print("=" * 60)

    # Test 1: the factor tau is reached on a star with one edge per time
    G = tau_star(3)
    report = snapshot_matching_approx(G)
    assert report.size == 1
    assert report.chosen_time == 1
    assert report.per_step == [(1, 1), (2, 1), (3, 1)]
    assert report.bound_factor == Fraction(3)
    assert brute_max_matching(G)[0] == 3
    print("✓ Test 1 passed: Tight star")

    # Test 2: the answer is a static matching of the chosen snapshot
    for G in random_instances(150, seed=22):
        report = snapshot_matching_approx(G)
        assert verify_matching(G, report.solution).ok
        assert is_static_matching(report.solution.edges)
        assert report.solution.edges <= snapshot(G, report.chosen_time).edges
        assert report.size == max(size for _, size in report.per_step)
        assert brute_max_matching(G)[0] <= report.bound_factor * report.size
    print("✓ Test 2 passed: 150 random instances")

    # Test 3: one time step makes the snapshot exact
    for G in random_instances(50, seed=23, max_tau=1):
        assert snapshot_matching_approx(G).size == brute_max_matching(G)[0]
    print("✓ Test 3 passed: Lifetime 1")

    # Test 4: ties keep the earliest time
    report = snapshot_matching_approx(k2((2, 3)))
    assert report.chosen_time == 2
    assert report.per_step == [(1, 0), (2, 1), (3, 1)]
    print("✓ Test 4 passed: Tie-breaking")

    print()


def run_all_tests():
    """Run all tests."""
    print("\n")
    print("╔" + "=" * 58 + "╗")
    print("║" + " tempoc approximations - Test Suite ".center(58) + "║")
    print("╚" + "=" * 58 + "╝")
    print()

    try:
        test_greedy_cover()
        test_snapshot_matching()

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
