# src/tournament/ordering.py
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from tournament.graph import ExplicitTournament, Tournament
from utils.errors import InvalidOrderingError


@dataclass(frozen=True)
class Ordering:
    """
    A vertex ordering x_1..x_n. `perm[p - 1]` is the vertex at (1-based)
    position p. `forward_count` is None only for orderings of huge implicit
    tournaments where the quadratic recount is never paid.
    """
    perm: Tuple[int, ...]
    forward_count: Optional[int]

    @classmethod
    def build(cls, tournament: Tournament, perm: Iterable[int]) -> 'Ordering':
        perm = tuple(int(v) for v in perm)
        validate_permutation(tournament, perm)
        return cls(perm, count_forward(tournament, perm))

    @classmethod
    def identity(cls, tournament: Tournament, scored: bool = True) -> 'Ordering':
        perm = tuple(range(tournament.n))
        return cls(perm, count_forward(tournament, perm) if scored else None)

    @property
    def n(self) -> int:
        return len(self.perm)

    def at(self, position: int) -> int:
        """Vertex x_position (1-based)."""
        return self.perm[position - 1]

    def window(self, start: int, stop: int) -> Tuple[int, ...]:
        """Vertices at positions start..stop-1 (1-based, half-open, clipped)."""
        return self.perm[max(start, 1) - 1:max(stop, 1) - 1]

    def positions(self) -> dict:
        return {v: p + 1 for p, v in enumerate(self.perm)}

    def __len__(self) -> int:
        return len(self.perm)


def validate_permutation(tournament: Tournament, perm: Sequence[int]) -> None:
    if len(perm) != tournament.n or set(perm) != set(range(tournament.n)):
        raise InvalidOrderingError(
            f"ordering of length {len(perm)} is not a permutation of the {tournament.n} vertices"
        )


def count_forward(tournament: Tournament, perm: Sequence[int]) -> int:
    """Number of position pairs p < q with x_p -> x_q."""
    n = len(perm)
    if n < 2:
        return 0
    if isinstance(tournament, ExplicitTournament):
        idx = np.asarray(perm, dtype=np.int64)
        return int(np.triu(tournament.adjacency[np.ix_(idx, idx)], k=1).sum())
    arr = np.asarray(perm, dtype=np.int64)
    return int(sum(tournament.beats_many(int(arr[p]), arr[p + 1:]).sum() for p in range(n - 1)))


def forward_edges(tournament: Tournament, ordering: Ordering) -> int:
    """
    Recounts the forward edges of `ordering` from scratch.

    Raises:
        InvalidOrderingError: If the ordering is not a permutation of the vertices.
    """
    validate_permutation(tournament, ordering.perm)
    return count_forward(tournament, ordering.perm)


def score_ordering(tournament: ExplicitTournament) -> Ordering:
    """Vertices by decreasing out-degree, ties by vertex id."""
    degrees = tournament.out_degrees()
    perm = sorted(range(tournament.n), key=lambda v: (-int(degrees[v]), v))
    return Ordering.build(tournament, perm)
