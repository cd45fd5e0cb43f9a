# src/tournament/witness.py
from enum import Enum
from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from tournament.graph import Tournament
from utils.errors import InvalidParameterError, ParseError


class WitnessMode(str, Enum):
    PLAIN = "plain"
    BLOCK_TRANSITIVE = "block_transitive"


class PowerPathWitness(BaseModel):
    """
    A vertex sequence v_0..v_{m-1} claimed to carry the k-th power of a
    directed path. Sizes are vertex counts. `partial` marks a heuristic run
    that stopped early; the sequence itself is still checkable.
    """
    k: int = Field(ge=1)
    mode: WitnessMode = WitnessMode.PLAIN
    vertices: List[int]
    partial: bool = Field(default=False, exclude=True)

    model_config = ConfigDict(frozen=True)

    def __len__(self) -> int:
        return len(self.vertices)

    def to_line(self) -> str:
        """Single JSON line: {"k":K,"mode":"plain","vertices":[...]}."""
        return self.model_dump_json()

    @classmethod
    def from_line(cls, text: str) -> 'PowerPathWitness':
        try:
            return cls.model_validate_json(text.strip())
        except ValidationError as e:
            raise ParseError(f"malformed witness line: {e.errors()[0]['msg']}", line=1) from None

    def verify(self, tournament: Tournament) -> bool:
        return verify_power_path(tournament, self.vertices, self.k, self.mode)


def _required_pairs(m: int, k: int, mode: WitnessMode):
    for a in range(m):
        if mode is WitnessMode.PLAIN:
            stop = min(m, a + k + 1)
        else:
            # a < b with floor(a/k) + 1 >= floor(b/k): b reaches the end of the next block.
            stop = min(m, (a // k + 2) * k)
            stop = max(stop, min(m, a + k + 1))
        for b in range(a + 1, stop):
            yield a, b


def verify_power_path(
    tournament: Tournament,
    vertices: Sequence[int],
    k: int,
    mode: WitnessMode = WitnessMode.PLAIN,
) -> bool:
    """
    Checks that `vertices` carries the k-th power of a directed path.

    Plain mode needs v_i -> v_j for all i < j <= i + k. Block-transitive
    mode additionally needs v_a -> v_b whenever a < b and
    floor(a/k) + 1 >= floor(b/k).

    Raises:
        InvalidParameterError: If k < 1.
        InvalidVertexError: If a vertex is out of range.
    """
    if k < 1:
        raise InvalidParameterError(f"power order must be >= 1, got {k}")
    mode = WitnessMode(mode)
    for v in vertices:
        tournament._check_vertex(v)
    if len(set(vertices)) != len(vertices):
        return False
    return all(
        tournament.orient(vertices[a], vertices[b])
        for a, b in _required_pairs(len(vertices), k, mode)
    )
