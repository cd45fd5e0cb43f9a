import sys
from math import ceil
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1] / "pathPowers"
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / "src"))

from ordering.median import brute_force_median, exact_median, insertion_local_search
from ordering.properties import (
    check_properties,
    eliminate_bad_indices,
    repair_triples,
    rotate_triple,
)
from tournament.graph import c3chain, random_tournament, transitive
from tournament.ordering import Ordering, forward_edges
from utils.errors import CapacityError, NotLocallyOptimalError, RotationPreconditionError


def naive_bad_indices(tournament, perm):
    n = len(perm)
    x = [None] + list(perm)  # 1-based
    return [
        i for i in range(3, n - 1)
        if tournament.orient(x[i], x[i - 2])
        and (tournament.orient(x[i + 2], x[i]) or tournament.orient(x[i + 2], x[i - 1]))
    ]


def locally_optimal(tournament):
    return insertion_local_search(tournament, Ordering.identity(tournament))


# --- exact median ---

def test_exact_median_examples():
    assert exact_median(c3chain(3)).forward_count == 2
    median = exact_median(transitive(5))
    assert median.perm == (0, 1, 2, 3, 4)
    assert median.forward_count == 10


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("seed", range(8))
def test_exact_median_matches_factorial_oracle(n, seed):
    t = random_tournament(n, seed)
    median = exact_median(t)
    assert median.forward_count == brute_force_median(t)
    assert median.forward_count == forward_edges(t, median)


def test_exact_median_capacity():
    with pytest.raises(CapacityError):
        exact_median(transitive(6), cap=5)


def test_exact_median_has_no_improving_move():
    for seed in range(5):
        report = check_properties(random_tournament(12, seed), exact_median(random_tournament(12, seed)))
        assert report.is_locally_optimal
        assert report.is_adjacent_forward
        assert report.triple_violations == []


@pytest.mark.slow
@pytest.mark.parametrize("n", range(2, 9))
def test_exact_median_matches_factorial_oracle_many_seeds(n):
    for seed in range(1000):
        t = random_tournament(n, seed)
        assert exact_median(t).forward_count == brute_force_median(t)


# --- insertion local search ---

def test_local_search_sorts_transitive():
    t = transitive(6)
    result = insertion_local_search(t, Ordering.build(t, reversed(range(6))))
    assert result.perm == tuple(range(6))
    assert result.forward_count == 15


def test_local_search_keeps_c3chain_identity():
    t = c3chain(6)
    init = Ordering.identity(t)
    assert init.forward_count == 13
    assert insertion_local_search(t, init) == init


@pytest.mark.parametrize("seed", range(10))
def test_local_search_fixpoint_and_monotone(seed):
    t = random_tournament(40, seed)
    init = Ordering.build(t, reversed(range(40)))
    result = insertion_local_search(t, init)
    assert result.forward_count >= init.forward_count
    assert result.forward_count == forward_edges(t, result)
    assert insertion_local_search(t, result) == result
    report = check_properties(t, result)
    assert report.is_locally_optimal and report.is_adjacent_forward


@pytest.mark.parametrize("seed", range(5))
def test_locally_optimal_degree_bound(seed):
    t = random_tournament(30, seed)
    perm = locally_optimal(t).perm
    for p in range(30):
        for q in range(p + 1, 30):
            out = sum(t.orient(perm[p], perm[r]) for r in range(p + 1, q + 1))
            assert out >= ceil((q - p) / 2)


def test_local_search_capacity():
    t = transitive(10)
    with pytest.raises(CapacityError):
        insertion_local_search(t, Ordering.identity(t), cap=9)


# --- properties and rotations ---

def test_transitive_identity_has_no_bad_index():
    t = transitive(5)
    report = check_properties(t, Ordering.identity(t))
    assert report.bad_indices == []
    assert report.is_locally_optimal


def test_bad_indices_match_naive_scan():
    nonempty = 0
    for seed in range(40):
        t = random_tournament(7, seed)
        ordering = Ordering.identity(t)
        report = check_properties(t, ordering)
        assert report.bad_indices == naive_bad_indices(t, ordering.perm)
        nonempty += bool(report.bad_indices)
    assert nonempty > 0


def test_rotation_examples():
    t = c3chain(3)
    identity = Ordering.identity(t)
    first = rotate_triple(t, identity, 3, 1)
    second = rotate_triple(t, identity, 3, 2)
    assert first.perm == (1, 2, 0) and first.forward_count == 2
    assert second.perm == (2, 0, 1) and second.forward_count == 2


def test_rotation_requires_a_cycle():
    t = transitive(3)
    with pytest.raises(RotationPreconditionError) as info:
        rotate_triple(t, Ordering.identity(t), 3, 1)
    assert info.value.missing_edge == (2, 0)


@pytest.mark.parametrize("seed", range(20))
def test_rotation_preserves_forward_count(seed):
    t = random_tournament(10, seed)
    median = exact_median(t)
    perm = median.perm
    for i in range(3, 11):
        if t.orient(perm[i - 1], perm[i - 3]):
            for variant in (1, 2):
                rotated = rotate_triple(t, median, i, variant)
                assert forward_edges(t, rotated) == median.forward_count == rotated.forward_count


# --- bad-index elimination ---

def test_eliminate_leaves_transitive_unchanged():
    t = transitive(8)
    identity = Ordering.identity(t)
    assert eliminate_bad_indices(t, identity) == identity


def test_eliminate_on_c3chain_median():
    t = c3chain(9)
    median = exact_median(t)
    result = eliminate_bad_indices(t, median)
    assert check_properties(t, result).bad_indices == []
    assert result.forward_count == median.forward_count


def test_eliminate_rejects_non_locally_optimal():
    t = transitive(5)
    with pytest.raises(NotLocallyOptimalError):
        eliminate_bad_indices(t, Ordering.build(t, [4, 3, 2, 1, 0]))


@pytest.mark.parametrize("seed", range(30))
def test_eliminate_on_median_strictly_lowers_largest_bad_index(seed):
    n = 6 + seed % 9
    t = random_tournament(n, 1000 + seed)
    median = exact_median(t)
    rounds = []
    result = eliminate_bad_indices(t, median, rounds=rounds)
    largest = [i for i, _ in rounds]
    assert largest == sorted(largest, reverse=True)
    assert len(set(largest)) == len(largest)
    assert all(count == median.forward_count for _, count in rounds)
    assert check_properties(t, result).bad_indices == []


@pytest.mark.parametrize("seed", range(30))
def test_eliminate_on_locally_optimal_orderings(seed):
    n = 5 + seed
    t = random_tournament(n, seed)
    start = locally_optimal(t)
    result = eliminate_bad_indices(t, start)
    report = check_properties(t, result)
    assert report.bad_indices == []
    assert result.forward_count >= start.forward_count
    assert sorted(result.perm) == list(range(n))
    assert result.forward_count == forward_edges(t, result)


def test_repair_triples_restores_triple_property():
    for seed in range(20):
        t = random_tournament(25, seed)
        start = locally_optimal(t)
        repaired = repair_triples(t, start)
        report = check_properties(t, repaired)
        assert report.triple_violations == []
        assert report.is_locally_optimal
        assert repaired.forward_count >= start.forward_count


@pytest.mark.slow
def test_eliminate_statistical_run():
    for seed in range(10_000):
        n = 5 + seed % 36
        t = random_tournament(n, seed)
        start = locally_optimal(t)
        result = eliminate_bad_indices(t, start)
        assert check_properties(t, result).bad_indices == []
        assert result.forward_count >= start.forward_count


def test_elimination_passes_cap_to_local_search():
    t = random_tournament(40, 3)
    start = insertion_local_search(t, Ordering.identity(t))
    with pytest.raises(CapacityError):
        eliminate_bad_indices(t, start, cap=10)
    result = eliminate_bad_indices(t, start, cap=40)
    assert check_properties(t, result).bad_indices == []
