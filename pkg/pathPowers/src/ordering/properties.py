# src/ordering/properties.py
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ordering.median import insertion_gains, insertion_local_search
from tournament.graph import Tournament, as_explicit
from tournament.ordering import Ordering, count_forward, validate_permutation
from utils.errors import (
    InternalContractError,
    InvalidParameterError,
    NotLocallyOptimalError,
    RotationPreconditionError,
)
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class OrderingReport:
    """
    Snapshot of the median-ordering properties of one ordering.

    `interval_move_violations` lists (vertex, target position) pairs whose
    single-vertex move strictly gains forward edges; `bad_indices` and
    `triple_violations` are ascending 1-based positions.
    """
    ordering: Ordering
    is_adjacent_forward: bool
    interval_move_violations: List[Tuple[int, int]] = field(default_factory=list)
    bad_indices: List[int] = field(default_factory=list)
    triple_violations: List[int] = field(default_factory=list)

    @property
    def is_locally_optimal(self) -> bool:
        return not self.interval_move_violations


def _bad_indices(adj: np.ndarray, perm: np.ndarray) -> List[int]:
    n = len(perm)
    if n < 5:
        return []
    idx = np.arange(3, n - 1)
    back = adj[perm[idx - 1], perm[idx - 3]]
    beaten = adj[perm[idx + 1], perm[idx - 1]] | adj[perm[idx + 1], perm[idx - 2]]
    return [int(i) for i in idx[back & beaten]]


def _backward_triples(adj: np.ndarray, perm: np.ndarray) -> List[int]:
    """Positions i >= 3 with x_i -> x_{i-2}."""
    n = len(perm)
    if n < 3:
        return []
    idx = np.arange(3, n + 1)
    return [int(i) for i in idx[adj[perm[idx - 1], perm[idx - 3]]]]


def _triple_violation(adj: np.ndarray, perm: np.ndarray, i: int) -> Optional[str]:
    """
    For a backward triple at i, which half of the median property fails:
    'next' if x_{i+1} beats one of x_{i-2}, x_{i-1}, x_i; 'after' if x_{i+2}
    beats two of them; None if neither.
    """
    n = len(perm)
    triple = perm[i - 3:i]
    if i + 1 <= n and adj[perm[i], triple].any():
        return "next"
    if i + 2 <= n and int(adj[perm[i + 1], triple].sum()) >= 2:
        return "after"
    return None


def _interval_move_violations(adj: np.ndarray, perm: np.ndarray) -> List[Tuple[int, int]]:
    violations = []
    for p in range(len(perm)):
        gains = insertion_gains(adj, perm, p)
        for q in np.nonzero(gains > 0)[0]:
            violations.append((int(perm[p]), int(q) + 1))
    return violations


def check_properties(tournament: Tournament, ordering: Ordering) -> OrderingReport:
    """
    Reports adjacency forwardness, every strictly improving single-vertex
    move, the bad indices (3 <= i <= n-2, x_i -> x_{i-2}, and x_{i+2} beats
    x_i or x_{i-1}) and the positions where the triple property fails.
    """
    validate_permutation(tournament, ordering.perm)
    adj = as_explicit(tournament).adjacency
    perm = np.asarray(ordering.perm, dtype=np.int64)
    adjacent = bool(adj[perm[:-1], perm[1:]].all()) if len(perm) > 1 else True
    return OrderingReport(
        ordering=ordering,
        is_adjacent_forward=adjacent,
        interval_move_violations=_interval_move_violations(adj, perm),
        bad_indices=_bad_indices(adj, perm),
        triple_violations=[i for i in _backward_triples(adj, perm) if _triple_violation(adj, perm, i)],
    )


def _rotate_perm(perm: Tuple[int, ...], i: int, variant: int) -> Tuple[int, ...]:
    a, b, c = perm[i - 3:i]
    middle = (b, c, a) if variant == 1 else (c, a, b)
    return perm[:i - 3] + middle + perm[i:]


def rotate_triple(tournament: Tournament, ordering: Ordering, i: int, variant: int) -> Ordering:
    """
    Cyclically shifts the directed 3-cycle x_{i-2} -> x_{i-1} -> x_i -> x_{i-2}.
    Variant 1 yields ..x_{i-1}, x_i, x_{i-2}..; variant 2 yields
    ..x_i, x_{i-2}, x_{i-1}... The forward-edge count is unchanged.

    Raises:
        InvalidParameterError: If i or variant is out of range.
        RotationPreconditionError: Naming the first missing cycle edge.
    """
    if variant not in (1, 2):
        raise InvalidParameterError(f"rotation variant must be 1 or 2, got {variant}")
    if not 3 <= i <= ordering.n:
        raise InvalidParameterError(f"rotation index must lie in [3, {ordering.n}], got {i}")
    a, b, c = ordering.perm[i - 3:i]
    for u, v in ((c, a), (a, b), (b, c)):
        if not tournament.orient(u, v):
            raise RotationPreconditionError((u, v))
    return Ordering(_rotate_perm(ordering.perm, i, variant), ordering.forward_count)


def _exposing_rotation(adj: np.ndarray, ordering: Ordering, i: int, kind: str) -> Ordering:
    """
    Rotations (forward count unchanged) after which some adjacent pair is
    backward, so that local search must strictly improve.
    """
    perm = ordering.perm
    a, b, c = perm[i - 3:i]
    nxt = perm[i]
    if kind == "next":
        # x_i -> x_{i+1} by adjacency, so x_{i+1} beats x_{i-2} or x_{i-1}
        variant = 1 if adj[nxt, a] else 2
        return Ordering(_rotate_perm(perm, i, variant), ordering.forward_count)

    after = perm[i + 1]
    # bring the two vertices beaten by x_{i+2} to positions i-1, i
    if adj[after, b] and adj[after, c]:
        rotated = perm
    elif adj[after, c] and adj[after, a]:
        rotated = _rotate_perm(perm, i, 1)
    else:
        rotated = _rotate_perm(perm, i, 2)
    # x'_i -> x_{i+1} -> x_{i+2} -> x'_i; moving x_{i+2} right after x'_{i-1}
    return Ordering(_rotate_perm(rotated, i + 2, 2), ordering.forward_count)


def repair_triples(tournament: Tournament, ordering: Ordering, cap: Optional[int] = None) -> Ordering:
    """
    Returns a locally optimal ordering, with at least the input's forward
    count, in which every backward triple x_i -> x_{i-2} has x_{i-2}, x_{i-1},
    x_i all beating x_{i+1} and at most one of them beaten by x_{i+2}.
    Each repair strictly gains forward edges, so the loop terminates.
    `cap` is handed to insertion_local_search.
    """
    adj = as_explicit(tournament).adjacency
    current = insertion_local_search(tournament, ordering, cap=cap)
    while True:
        perm = np.asarray(current.perm, dtype=np.int64)
        found = None
        for i in _backward_triples(adj, perm):
            kind = _triple_violation(adj, perm, i)
            if kind:
                found = (i, kind)
                break
        if found is None:
            return current
        i, kind = found
        improved = insertion_local_search(tournament, _exposing_rotation(adj, current, i, kind), cap=cap)
        if improved.forward_count <= current.forward_count:
            raise InternalContractError(
                f"triple repair at position {i} ({kind}) did not gain forward edges"
            )
        logger.debug(f"Triple repair at position {i} ({kind}): {current.forward_count} -> {improved.forward_count}.")
        current = improved


def eliminate_bad_indices(
    tournament: Tournament,
    ordering: Ordering,
    rounds: Optional[List[Tuple[int, int]]] = None,
    cap: Optional[int] = None,
) -> Ordering:
    """
    Rotates bad indices away, largest first. At bad index i the rotation is
    chosen so that x_{i+2} beats the vertex landing at i-2 (variant 2 when
    x_{i+2} -> x_i, variant 1 otherwise). If a bad index >= i survives, the
    ordering is re-optimized and the loop restarts; progress is measured by
    (forward count, -largest bad index).

    Args:
        rounds: If given, receives (largest bad index, forward count) before
            every rotation.
        cap: Local-search cap for the re-optimizations, LOCAL_SEARCH_CAP by default.

    Raises:
        NotLocallyOptimalError: If the input admits an improving single-vertex move.
    """
    validate_permutation(tournament, ordering.perm)
    if ordering.forward_count is None:
        ordering = Ordering(ordering.perm, count_forward(tournament, ordering.perm))
    if tournament.n <= 2:
        return ordering
    adj = as_explicit(tournament).adjacency
    perm = np.asarray(ordering.perm, dtype=np.int64)
    if _interval_move_violations(adj, perm):
        raise NotLocallyOptimalError("eliminate_bad_indices needs an insertion-locally-optimal ordering")

    current = ordering
    iterations = 0
    while True:
        current = repair_triples(tournament, current, cap=cap)
        perm = np.asarray(current.perm, dtype=np.int64)
        bad = _bad_indices(adj, perm)
        if not bad:
            break
        i = bad[-1]
        if rounds is not None:
            rounds.append((i, current.forward_count))
        variant = 2 if adj[perm[i + 1], perm[i - 1]] else 1
        rotated = rotate_triple(tournament, current, i, variant)
        remaining = _bad_indices(adj, np.asarray(rotated.perm, dtype=np.int64))
        if remaining and remaining[-1] >= i:
            restarted = insertion_local_search(tournament, rotated, cap=cap)
            if restarted.forward_count <= current.forward_count:
                raise InternalContractError(f"bad index {remaining[-1]} survived rotation at {i}")
            logger.debug(f"Rotation at {i} left bad index {remaining[-1]}; restarted local search.")
            rotated = restarted
        current = rotated
        iterations += 1

    logger.debug(f"Bad-index elimination finished after {iterations} rotations ({current.forward_count} forward edges).")
    return current
