# src/ordering/median.py
from functools import lru_cache
from itertools import permutations
from typing import Optional

import numpy as np

from tournament.graph import Tournament, as_explicit
from tournament.ordering import Ordering, count_forward, validate_permutation
from utils.config import load_config
from utils.errors import CapacityError
from utils.logger import get_logger

logger = get_logger(__name__)

BRUTE_FORCE_CAP = 9


def _popcounts(bits: int) -> np.ndarray:
    pc = np.zeros(1 << bits, dtype=np.int16)
    for b in range(bits):
        pc[1 << b:1 << (b + 1)] = pc[:1 << b] + 1
    return pc


def exact_median(tournament: Tournament, cap: Optional[int] = None) -> Ordering:
    """
    Median ordering by dynamic programming over vertex subsets:
    dp[S] = max over v in S of dp[S - v] + |in-neighbours of v inside S - v|,
    v being placed last. Ties go to the smallest vertex id.

    Args:
        tournament (Tournament): The tournament; materialized if implicit.
        cap (Optional[int]): Largest admissible n, EXACT_MEDIAN_CAP by default.

    Raises:
        CapacityError: If n exceeds the cap.
    """
    cap = load_config().EXACT_MEDIAN_CAP if cap is None else cap
    n = tournament.n
    if n > cap:
        raise CapacityError(
            f"exact median ordering is capped at n={cap} (got n={n}); use insertion_local_search instead"
        )
    adj = as_explicit(tournament).adjacency
    # in_mask[v] has bit u set iff u -> v
    weights = 1 << np.arange(n, dtype=np.int64)
    in_mask = (adj.T.astype(np.int64) * weights).sum(axis=1)

    size = 1 << n
    pc = _popcounts(n)
    dp = np.full(size, -1, dtype=np.int32)
    choice = np.zeros(size, dtype=np.int8)
    dp[0] = 0
    masks = np.arange(size, dtype=np.int64)
    layers = [masks[pc == c] for c in range(n + 1)]

    for c in range(1, n + 1):
        layer = layers[c]
        best = np.full(layer.size, -1, dtype=np.int32)
        arg = np.zeros(layer.size, dtype=np.int8)
        for v in range(n):
            has_v = ((layer >> v) & 1).astype(bool)
            sel = layer[has_v]
            cand = dp[sel ^ (1 << v)] + pc[sel & in_mask[v]]
            idx = np.nonzero(has_v)[0]
            better = cand > best[idx]
            best[idx[better]] = cand[better]
            arg[idx[better]] = v
        dp[layer] = best
        choice[layer] = arg

    order = []
    state = size - 1
    while state:
        v = int(choice[state])
        order.append(v)
        state ^= 1 << v
    order.reverse()
    result = Ordering(tuple(order), int(dp[size - 1]))
    logger.debug(f"Exact median ordering on n={n}: {result.forward_count} forward edges.")
    return result


def insertion_gains(adj: np.ndarray, perm: np.ndarray, p: int) -> np.ndarray:
    """
    Change in forward edges for moving the vertex at 0-based position p so
    that it ends at position q, for every q (entry p is 0).
    """
    o = adj[perm[p], perm]
    d = np.where(o, 1, -1)
    d[p] = 0
    cum = np.cumsum(d)
    gains = np.zeros(len(perm), dtype=np.int64)
    gains[p + 1:] = cum[p] - cum[p + 1:]
    if p > 0:
        before = np.concatenate(([0], cum[:p - 1]))
        gains[:p] = cum[p - 1] - before
    return gains


def insertion_local_search(
    tournament: Tournament,
    init: Ordering,
    cap: Optional[int] = None,
) -> Ordering:
    """
    Improves `init` until no single vertex can be removed and reinserted
    elsewhere to gain forward edges. Positions are scanned in order; the
    first vertex that admits a strictly improving move is moved to its best
    target (leftmost on ties) and the scan resumes at the same position.

    Raises:
        InvalidOrderingError: If `init` is not a permutation of the vertices.
        CapacityError: If n exceeds LOCAL_SEARCH_CAP.
    """
    validate_permutation(tournament, init.perm)
    cap = load_config().LOCAL_SEARCH_CAP if cap is None else cap
    n = tournament.n
    if n > cap:
        raise CapacityError(f"insertion local search is capped at n={cap} (got n={n})")
    forward = init.forward_count if init.forward_count is not None else count_forward(tournament, init.perm)
    if n <= 1:
        return Ordering(init.perm, forward)

    adj = as_explicit(tournament).adjacency
    perm = np.asarray(init.perm, dtype=np.int64)
    moves = 0
    passes = 0
    improved = True
    while improved:
        improved = False
        passes += 1
        p = 0
        while p < n:
            gains = insertion_gains(adj, perm, p)
            q = int(np.argmax(gains))
            gain = int(gains[q])
            if gain <= 0:
                p += 1
                continue
            v = perm[p]
            if q > p:
                perm[p:q] = perm[p + 1:q + 1].copy()
            else:
                perm[q + 1:p + 1] = perm[q:p].copy()
            perm[q] = v
            forward += gain
            moves += 1
            improved = True

    logger.debug(f"Local search on n={n}: {moves} moves over {passes} passes, {forward} forward edges.")
    return Ordering(tuple(int(v) for v in perm), forward)


@lru_cache(maxsize=BRUTE_FORCE_CAP + 1)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)


def brute_force_median(tournament: Tournament) -> int:
    """Maximum forward-edge count over all n! orderings (factorial oracle, n <= 9)."""
    n = tournament.n
    if n > BRUTE_FORCE_CAP:
        raise CapacityError(f"factorial oracle is capped at n={BRUTE_FORCE_CAP} (got n={n})")
    if n < 2:
        return 0
    adj = as_explicit(tournament).adjacency
    perms = _all_permutations(n)
    totals = np.zeros(len(perms), dtype=np.int64)
    for p in range(n - 1):
        for q in range(p + 1, n):
            totals += adj[perms[:, p], perms[:, q]]
    return int(totals.max())
