# src/tournament/constructions.py
from typing import List, Sequence

import numpy as np

from tournament.graph import ExplicitTournament, Tournament
from utils.errors import InvalidParameterError, UnsupportedStorageError


def sub_adjacency(tournament: Tournament, vertices: Sequence[int]) -> np.ndarray:
    """Dense matrix M with M[a, b] True iff vertices[a] -> vertices[b]."""
    idx = np.asarray(vertices, dtype=np.int64)
    if isinstance(tournament, ExplicitTournament):
        return tournament.adjacency[np.ix_(idx, idx)]
    return np.vstack([tournament.beats_many(int(v), idx) for v in idx]) if len(idx) else np.zeros((0, 0), bool)


def greedy_transitive(tournament: Tournament, subset: Sequence[int]) -> List[int]:
    """
    Folklore greedy: take a vertex of maximum out-degree inside the current
    set (smallest id on ties), keep it, and recurse on its out-neighbourhood.
    The result u_1..u_r satisfies u_a -> u_b for a < b and r >= floor(log2 |S|) + 1.

    Raises:
        InvalidParameterError: If the subset is empty.
    """
    vertices = sorted(set(int(v) for v in subset))
    if not vertices:
        raise InvalidParameterError("greedy_transitive needs a non-empty vertex set")
    for v in vertices:
        tournament._check_vertex(v)

    adj = sub_adjacency(tournament, vertices)
    alive = np.arange(len(vertices))
    chain: List[int] = []
    while alive.size:
        degrees = adj[np.ix_(alive, alive)].sum(axis=1)
        best = int(alive[int(np.argmax(degrees))])
        chain.append(vertices[best])
        alive = alive[adj[best, alive]]
    return chain


def compose_forward(first: Tournament, second: Tournament) -> ExplicitTournament:
    """
    Disjoint union on n + m vertices, `first` occupying 0..n-1, with every
    cross edge directed from `first` to `second`.

    Raises:
        UnsupportedStorageError: If either input is implicit.
    """
    return compose_chain([first, second])


def compose_chain(blocks: Sequence[Tournament]) -> ExplicitTournament:
    """Left-to-right composition of several blocks; earlier blocks beat later ones."""
    if not blocks:
        raise InvalidParameterError("nothing to compose")
    for block in blocks:
        if not isinstance(block, ExplicitTournament):
            raise UnsupportedStorageError("compose_forward needs explicit tournaments")
    total = sum(b.n for b in blocks)
    adj = np.zeros((total, total), dtype=bool)
    start = 0
    for block in blocks:
        stop = start + block.n
        adj[start:stop, start:stop] = block.adjacency
        adj[start:stop, stop:] = True
        start = stop
    return ExplicitTournament.from_matrix(adj)
