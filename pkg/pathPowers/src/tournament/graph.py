# src/tournament/graph.py
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from utils.errors import InvalidParameterError, InvalidVertexError
from utils.logger import get_logger

logger = get_logger(__name__)

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


class StorageKind(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class Model(str, Enum):
    RANDOM = "random"
    TRANSITIVE = "transitive"
    C3CHAIN = "c3chain"
    IMPLICIT_RANDOM = "implicit_random"


def mix64(x: int) -> int:
    """splitmix64 finaliser on Python integers."""
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * _MUL1) & MASK64
    x = ((x ^ (x >> 27)) * _MUL2) & MASK64
    return x ^ (x >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    """The same finaliser on uint64 arrays; wraps modulo 2^64 like the scalar one."""
    x = x + np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MUL1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MUL2)
    return x ^ (x >> np.uint64(31))


def triangle_size(n: int) -> int:
    return n * (n - 1) // 2


def _upper_index(n: int, i: int, j: int) -> int:
    """Row-major offset of (i, j), i < j, inside the strict upper triangle."""
    return i * n - i * (i + 1) // 2 + (j - i - 1)


class Tournament:
    """
    An n-vertex tournament. Subclasses decide how orientations are stored;
    both answer `orient(u, v)` in constant time and are immutable.
    """
    storage_kind: StorageKind

    def __init__(self, n: int):
        if n < 1:
            raise InvalidParameterError(f"a tournament needs n >= 1, got {n}")
        self.n = n

    def _bit(self, i: int, j: int) -> bool:
        """True iff i -> j, for 0 <= i < j < n (unchecked)."""
        raise NotImplementedError

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InvalidVertexError(f"vertex {v} is out of range for n={self.n}")

    def orient(self, u: int, v: int) -> bool:
        """Returns True iff the edge is directed u -> v."""
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise InvalidVertexError(f"orientation of the loop ({u}, {u}) is undefined")
        if u < v:
            return self._bit(u, v)
        return not self._bit(v, u)

    def beats_many(self, u: int, others: np.ndarray) -> np.ndarray:
        """Boolean vector: entry a is True iff u -> others[a] (u itself maps to False)."""
        return np.fromiter(
            (w != u and self.orient(u, int(w)) for w in others),
            dtype=bool,
            count=len(others),
        )

    def __len__(self) -> int:
        return self.n


class ExplicitTournament(Tournament):
    """
    Bit-packed strict upper triangle: bit (i, j) with i < j is set iff i -> j.
    A dense boolean matrix is derived lazily for vectorised algorithms.
    """
    storage_kind = StorageKind.EXPLICIT

    def __init__(self, n: int, packed: np.ndarray):
        super().__init__(n)
        expected = (triangle_size(n) + 7) // 8
        if packed.dtype != np.uint8 or packed.shape != (expected,):
            raise InvalidParameterError(
                f"packed table for n={n} needs {expected} bytes, got shape {packed.shape}"
            )
        self._packed = packed.copy()
        self._packed.setflags(write=False)

    @classmethod
    def from_upper_bits(cls, n: int, bits: np.ndarray) -> 'ExplicitTournament':
        """Builds from a 0/1 vector of length n(n-1)/2 in row-major upper-triangle order."""
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (triangle_size(n),):
            raise InvalidParameterError(
                f"expected {triangle_size(n)} orientation bits for n={n}, got {bits.size}"
            )
        return cls(n, np.packbits(bits, bitorder="little"))

    @classmethod
    def from_matrix(cls, adj: np.ndarray) -> 'ExplicitTournament':
        """Builds from a dense boolean matrix; only the strict upper triangle is read."""
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        rows, cols = np.triu_indices(n, k=1)
        return cls.from_upper_bits(n, adj[rows, cols])

    @classmethod
    def from_edge_function(cls, n: int, beats) -> 'ExplicitTournament':
        """Builds from a predicate beats(i, j) evaluated for every i < j."""
        bits = np.fromiter(
            (bool(beats(i, j)) for i in range(n) for j in range(i + 1, n)),
            dtype=bool,
            count=triangle_size(n),
        )
        return cls.from_upper_bits(n, bits)

    def _bit(self, i: int, j: int) -> bool:
        idx = _upper_index(self.n, i, j)
        return bool((self._packed[idx >> 3] >> (idx & 7)) & 1)

    def upper_bits(self) -> np.ndarray:
        return np.unpackbits(
            self._packed, count=triangle_size(self.n), bitorder="little"
        ).astype(bool)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense read-only matrix with adj[u, v] True iff u -> v."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        rows, cols = np.triu_indices(self.n, k=1)
        bits = self.upper_bits()
        adj[rows, cols] = bits
        adj[cols, rows] = ~bits
        adj.setflags(write=False)
        return adj

    def out_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def beats_many(self, u: int, others: np.ndarray) -> np.ndarray:
        return self.adjacency[u, np.asarray(others, dtype=np.int64)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExplicitTournament):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._packed, other._packed)

    def __hash__(self) -> int:
        return hash((self.n, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"ExplicitTournament(n={self.n})"


class ImplicitTournament(Tournament):
    """
    Orientation of {u, v} is one bit of a keyed 64-bit hash of
    (min(u, v), max(u, v), seed). Nothing is stored, so n may be very large.
    """
    storage_kind = StorageKind.IMPLICIT

    def __init__(self, n: int, seed: int):
        super().__init__(n)
        self.seed = seed & MASK64
        self._key = mix64(self.seed)

    def _bit(self, i: int, j: int) -> bool:
        return bool(mix64(mix64(self._key ^ i) ^ j) & 1)

    def beats_many(self, u: int, others: np.ndarray) -> np.ndarray:
        others = np.asarray(others, dtype=np.int64)
        lo = np.minimum(others, u).astype(np.uint64)
        hi = np.maximum(others, u).astype(np.uint64)
        h = mix64_array(mix64_array(np.uint64(self._key) ^ lo) ^ hi)
        low_wins = (h & np.uint64(1)).astype(bool)
        # u -> w iff (u is the low end and low wins) or (u is the high end and low loses)
        result = np.where(others > u, low_wins, ~low_wins)
        result[others == u] = False
        return result

    def materialize(self) -> ExplicitTournament:
        """Explicit copy answering every orientation query identically."""
        if self.n > 50_000:
            logger.warning(f"Materializing an implicit tournament with n={self.n}; this is memory hungry.")
        rows, cols = np.triu_indices(self.n, k=1)
        h = mix64_array(mix64_array(np.uint64(self._key) ^ rows.astype(np.uint64)) ^ cols.astype(np.uint64))
        return ExplicitTournament.from_upper_bits(self.n, (h & np.uint64(1)).astype(bool))

    def __repr__(self) -> str:
        return f"ImplicitTournament(n={self.n}, seed={self.seed})"


def transitive(n: int) -> ExplicitTournament:
    return ExplicitTournament.from_upper_bits(n, np.ones(triangle_size(n), dtype=bool))


def c3chain(n: int) -> ExplicitTournament:
    """Consecutive triples are cyclic triangles a->b->c->a; earlier triples beat later ones."""
    if n % 3 != 0:
        raise InvalidParameterError(f"c3chain needs n divisible by 3, got {n}")

    def beats(i: int, j: int) -> bool:
        if i // 3 != j // 3:
            return True
        # Inside a triple only the closing edge (first, last) points backward.
        return not (i % 3 == 0 and j % 3 == 2)

    return ExplicitTournament.from_edge_function(n, beats)


def random_tournament(n: int, seed: int) -> ExplicitTournament:
    """Each pair oriented by an independent fair coin from a seeded generator."""
    rng = np.random.default_rng(seed & MASK64)
    return ExplicitTournament.from_upper_bits(n, rng.integers(0, 2, size=triangle_size(n)).astype(bool))


def generate(model: str, n: int, seed: int = 0) -> Tournament:
    """
    Deterministic tournament generator.

    Args:
        model (str): One of random, transitive, c3chain, implicit_random.
        n (int): Vertex count, at least 1.
        seed (int): 64-bit seed; ignored by the deterministic models.

    Returns:
        Tournament: The generated tournament.

    Raises:
        InvalidParameterError: On an unknown model, n < 1, or c3chain with 3 ∤ n.
    """
    try:
        model = Model(model)
    except ValueError:
        raise InvalidParameterError(f"unknown tournament model '{model}'") from None
    if n < 1:
        raise InvalidParameterError(f"a tournament needs n >= 1, got {n}")

    if model is Model.RANDOM:
        tournament: Tournament = random_tournament(n, seed)
    elif model is Model.TRANSITIVE:
        tournament = transitive(n)
    elif model is Model.C3CHAIN:
        tournament = c3chain(n)
    else:
        tournament = ImplicitTournament(n, seed)
    logger.debug(f"Generated {model.value} tournament on {n} vertices (seed={seed}).")
    return tournament


def relabel(tournament: Tournament, perm: Sequence[int]) -> ExplicitTournament:
    """Explicit tournament with perm[u] -> perm[v] iff u -> v in the input."""
    n = tournament.n
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(n)):
        raise InvalidParameterError("relabeling must be a permutation of the vertices")
    adj = as_explicit(tournament).adjacency
    new = np.zeros((n, n), dtype=bool)
    new[np.ix_(perm, perm)] = adj
    return ExplicitTournament.from_matrix(new)


def induced(tournament: Tournament, vertices: Sequence[int]) -> ExplicitTournament:
    """Sub-tournament on `vertices`; vertex a of the result is vertices[a]."""
    if not vertices:
        raise InvalidParameterError("an induced sub-tournament needs at least one vertex")
    if len(set(vertices)) != len(vertices):
        raise InvalidParameterError("induced vertex list contains duplicates")
    for v in vertices:
        tournament._check_vertex(v)
    return ExplicitTournament.from_edge_function(
        len(vertices), lambda a, b: tournament.orient(vertices[a], vertices[b])
    )


def as_explicit(tournament: Tournament) -> ExplicitTournament:
    if isinstance(tournament, ExplicitTournament):
        return tournament
    return tournament.materialize()
