# src/extremal/oracle.py
from dataclasses import dataclass
from itertools import permutations
from typing import List, Optional, Sequence

import numpy as np

from tournament.graph import Tournament, as_explicit
from tournament.witness import verify_power_path
from utils.config import Settings, load_config
from utils.errors import CapacityError, InternalContractError, InvalidParameterError
from utils.logger import get_logger

logger = get_logger(__name__)

NAIVE_CAP = 8


@dataclass(frozen=True)
class OracleResult:
    """Longest k-th power path: its vertex count, one witness and the search effort."""
    max_vertices: int
    witness: List[int]
    nodes_explored: int


def out_masks(tournament: Tournament) -> List[int]:
    """Out-neighbourhoods as Python integer bitsets."""
    adj = as_explicit(tournament).adjacency
    weights = [1 << v for v in range(tournament.n)]
    return [sum(w for w, bit in zip(weights, row) if bit) for row in adj.tolist()]


def dfs_longest(masks: Sequence[int], k: int, stop_at: Optional[int] = None) -> OracleResult:
    """
    Depth-first search over power paths on bitset out-neighbourhoods.
    A path is extended by common out-neighbours of its last min(k, depth)
    vertices; a branch is cut once depth + unvisited vertices cannot beat the
    best found. Stops early once `stop_at` vertices are reached.
    """
    n = len(masks)
    full = (1 << n) - 1
    goal = n if stop_at is None else min(stop_at, n)
    best: List[int] = []
    path: List[int] = []
    nodes = 0

    def extend(visited: int) -> bool:
        nonlocal best, nodes
        nodes += 1
        depth = len(path)
        if depth > len(best):
            best = path.copy()
            if depth >= goal:
                return True
        unvisited = full & ~visited
        if depth + bin(unvisited).count("1") <= len(best):
            return False
        candidates = unvisited
        for v in path[-k:]:
            candidates &= masks[v]
        while candidates:
            low = candidates & -candidates
            c = low.bit_length() - 1
            candidates ^= low
            path.append(c)
            done = extend(visited | low)
            path.pop()
            if done:
                return True
        return False

    for start in range(n):
        path.append(start)
        done = extend(1 << start)
        path.pop()
        if done:
            break
    return OracleResult(max_vertices=len(best), witness=best, nodes_explored=nodes)


def _square_dp(tournament: Tournament) -> OracleResult:
    """
    Reachability over (visited set S, last vertex b): pred[S, b] is the bitset
    of vertices a such that some square path visits exactly S and ends a, b.
    """
    n = tournament.n
    adj = as_explicit(tournament).adjacency
    if n == 1:
        return OracleResult(1, [0], 1)
    size = 1 << n
    pred = np.zeros((size, n), dtype=np.int32)
    in_mask = [int(sum(1 << a for a in range(n) if adj[a, c])) for c in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and adj[a, b]:
                pred[(1 << a) | (1 << b), b] |= 1 << a

    pc = np.zeros(size, dtype=np.int8)
    for bit in range(n):
        pc[1 << bit:1 << (bit + 1)] = pc[:1 << bit] + 1
    masks = np.arange(size, dtype=np.int64)
    nodes = 0
    best_layer = 2 if adj.any() else 1
    for layer_size in range(2, n):
        layer = masks[pc == layer_size]
        for b in range(n):
            sb = layer[((layer >> b) & 1).astype(bool)]
            p = pred[sb, b]
            live = p != 0
            sb, p = sb[live], p[live]
            nodes += int(sb.size)
            if not sb.size:
                continue
            for c in range(n):
                if c == b or not adj[b, c]:
                    continue
                ok = ((sb >> c) & 1 == 0) & ((p & in_mask[c]) != 0)
                if ok.any():
                    targets = sb[ok] | (1 << c)
                    pred[targets, c] |= 1 << b
                    best_layer = max(best_layer, layer_size + 1)

    # rebuild one path of best_layer vertices
    ends = np.nonzero(pred[masks[pc == best_layer]].any(axis=1))[0] if best_layer >= 2 else []
    if best_layer < 2 or not len(ends):
        return OracleResult(1, [0], nodes)
    state = int(masks[pc == best_layer][ends[0]])
    b = int(np.nonzero(pred[state])[0][0])
    path = [b]
    follower = None
    while bin(state).count("1") > 1:
        options = int(pred[state, b])
        if follower is not None:
            options &= in_mask[follower]
        a = (options & -options).bit_length() - 1
        state ^= 1 << b
        path.append(a)
        follower, b = b, a
    path.reverse()
    return OracleResult(best_layer, path, nodes)


def longest_power_path(
    tournament: Tournament,
    k: int,
    stop_at: Optional[int] = None,
    cap: Optional[int] = None,
    config: Optional[Settings] = None,
) -> OracleResult:
    """
    Exact longest k-th power path, measured in vertices.

    k = 2 without an early-exit target uses the subset dynamic program
    (n <= ORACLE_CAP_SQUARE); everything else uses the depth-first search
    (n <= ORACLE_CAP). With `stop_at`, the search returns as soon as a path
    on that many vertices is found, so the result is exact only below it.

    Raises:
        CapacityError: If n exceeds the applicable cap.
    """
    if k < 1:
        raise InvalidParameterError(f"power order must be >= 1, got {k}")
    config = config or load_config()
    n = tournament.n
    use_dp = k == 2 and stop_at is None
    limit = cap if cap is not None else (config.ORACLE_CAP_SQUARE if use_dp else config.ORACLE_CAP)
    if n > limit:
        raise CapacityError(f"power-path oracle is capped at n={limit} for k={k} (got n={n})")

    result = _square_dp(tournament) if use_dp else dfs_longest(out_masks(tournament), k, stop_at)
    if not verify_power_path(tournament, result.witness, k):
        raise InternalContractError("oracle witness failed verification")
    logger.debug(f"Oracle k={k} n={n}: {result.max_vertices} vertices, {result.nodes_explored} nodes.")
    return result


def naive_longest_power_path(tournament: Tournament, k: int) -> int:
    """Tries every vertex sequence, longest first (n <= 8); independent of the search above."""
    n = tournament.n
    if n > NAIVE_CAP:
        raise CapacityError(f"naive enumeration is capped at n={NAIVE_CAP} (got n={n})")
    for m in range(n, 0, -1):
        for seq in permutations(range(n), m):
            if all(tournament.orient(seq[i], seq[j]) for i in range(m) for j in range(i + 1, min(m, i + k + 1))):
                return m
    return 0
