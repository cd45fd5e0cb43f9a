# src/embedding/power_path.py
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from embedding.kst import kst_select
from ordering.median import exact_median, insertion_local_search
from tournament.constructions import greedy_transitive
from tournament.graph import Tournament
from tournament.ordering import Ordering
from tournament.witness import PowerPathWitness, WitnessMode
from utils.config import Settings, load_config
from utils.errors import (
    CapacityError,
    InsufficientTransitiveError,
    InternalContractError,
    InvalidParameterError,
    NotFoundError,
    NotLocallyOptimalError,
    PathPowerError,
    PreconditionError,
    StepFailedError,
)
from utils.logger import get_logger

logger = get_logger(__name__)


class EmbedMode(str, Enum):
    GUARANTEED = "guaranteed"
    HEURISTIC = "heuristic"


def default_window(k: int) -> int:
    return 2 ** (4 * k + 4) * k


class EmbedParams(BaseModel):
    """
    Constants of the linear-length embedding. Omitted values default to
    t = 2^(4k+4) k, a_star = 2^(2k) and blocks = 2k + 1.
    """
    k: int = Field(ge=1)
    t: int = Field(ge=1)
    a_star: int = Field(ge=1)
    blocks: int = Field(ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("k"), int) and data["k"] >= 1:
            k = data["k"]
            defaults = {"t": default_window(k), "a_star": 4 ** k, "blocks": 2 * k + 1}
            data = {**data, **{key: value for key, value in defaults.items() if data.get(key) is None}}
        return data

    @model_validator(mode="after")
    def _check_window(self) -> 'EmbedParams':
        if self.a_star > self.t:
            raise ValueError(f"a_star ({self.a_star}) must not exceed t ({self.t})")
        return self

    @property
    def is_default(self) -> bool:
        k = self.k
        return self.t == default_window(k) and self.a_star == 4 ** k and self.blocks == 2 * k + 1

    @property
    def span(self) -> int:
        return self.blocks * self.t


def guaranteed_length_bound(n: int, k: int) -> float:
    """Path length (edges) promised for every n-vertex tournament: n / (2^(4k+6) k)."""
    return n / (2 ** (4 * k + 6) * k)


@dataclass(frozen=True)
class ClaimResult:
    chunk: List[int]
    j: int
    next_a: List[int]
    transitive: List[int]


@dataclass(frozen=True)
class StepRecord:
    s: int
    i: int
    a_set: Tuple[int, ...]
    chunk: Tuple[int, ...]
    j: int


@dataclass
class EmbedTrace:
    """Per-step audit log of the embedding loop; positions are 0-based interval ends."""
    t: int
    blocks: int
    steps: List[StepRecord] = field(default_factory=list)
    final_chunk: List[int] = field(default_factory=list)

    def violations(self) -> List[str]:
        problems = []
        for s, rec in enumerate(self.steps):
            if not set(rec.chunk) <= set(rec.a_set):
                problems.append(f"step {s}: chunk is not inside A_s")
            if not rec.i + self.t <= rec.j <= rec.i + self.blocks * self.t:
                problems.append(f"step {s}: j={rec.j} outside [i+t, i+blocks*t] for i={rec.i}")
            if s + 1 < len(self.steps):
                nxt = self.steps[s + 1]
                if nxt.i != rec.j:
                    problems.append(f"step {s}: next step starts at {nxt.i}, expected {rec.j}")
                # windows [i_s - t, i_s) and [i_{s+1} - t, i_{s+1}) must not overlap
                if nxt.i - self.t < rec.i:
                    problems.append(f"step {s}: windows overlap")
        return problems

    def to_lines(self) -> List[str]:
        lines = [
            json.dumps({"s": r.s, "i": r.i, "A": list(r.a_set), "chunk": list(r.chunk), "j": r.j},
                       separators=(",", ":"))
            for r in self.steps
        ]
        lines.append(json.dumps({"final": self.final_chunk}, separators=(",", ":")))
        return lines


def claim_step(
    tournament: Tournament,
    ordering: Ordering,
    i: int,
    a_star_set: Sequence[int],
    params: EmbedParams,
) -> ClaimResult:
    """
    One application of the window claim. Positions follow the 0-based
    interval convention [i, j) = {x at 0-based positions i..j-1}.

    Extracts a transitive A of size 2k+1 from A*, checks that each member
    has at least k t out-neighbours in B = [i, i + blocks t), picks a
    k-subset A' with blocks * a_star common out-neighbours in B, and returns
    the leftmost block [j - t, j) of B holding a_star of them.

    Raises:
        PreconditionError: If i or A* violate the window conditions.
        InsufficientTransitiveError: If A* has no transitive (2k+1)-subset found greedily.
        NotLocallyOptimalError: If the degree condition fails.
        StepFailedError: If no k-subset reaches the common out-neighbour threshold.
    """
    k, t, a_star, blocks = params.k, params.t, params.a_star, params.blocks
    n = tournament.n
    if i > n - params.span:
        raise PreconditionError(f"claim index {i} exceeds n - blocks*t = {n - params.span}")
    if len(set(a_star_set)) != a_star:
        raise PreconditionError(f"A* must hold exactly a_star={a_star} vertices, got {len(set(a_star_set))}")
    window = set(ordering.window(max(0, i - t) + 1, i + 1))
    outside = [v for v in a_star_set if v not in window]
    if outside:
        raise PreconditionError(f"vertex {outside[0]} of A* lies outside [{max(0, i - t)}, {i})", vertex=outside[0])

    transitive = greedy_transitive(tournament, a_star_set)
    if len(transitive) < 2 * k + 1:
        raise InsufficientTransitiveError(
            f"greedy found only {len(transitive)} transitive vertices in A*, need {2 * k + 1}"
        )
    a_side = transitive[:2 * k + 1]
    b_side = list(ordering.window(i + 1, i + params.span + 1))

    for v in a_side:
        out = int(tournament.beats_many(v, b_side).sum())
        if out < k * t:
            raise NotLocallyOptimalError(
                f"vertex {v} has {out} out-neighbours in [{i}, {i + params.span}), "
                f"a locally optimal ordering guarantees {k * t}"
            )

    try:
        selection = kst_select(tournament, a_side, b_side, k, blocks * a_star)
    except (NotFoundError, PreconditionError) as e:
        raise StepFailedError(f"claim step at i={i} failed: {e}") from e

    common = set(selection.common)
    for b in range(blocks):
        block = ordering.window(i + b * t + 1, i + (b + 1) * t + 1)
        hits = sorted(v for v in block if v in common)
        if len(hits) >= a_star:
            return ClaimResult(
                chunk=selection.subset,
                j=i + (b + 1) * t,
                next_a=hits[:a_star],
                transitive=a_side,
            )
    raise InternalContractError(
        f"{len(common)} common out-neighbours but no block of size {t} holds {a_star} of them"
    )


def _embedding_ordering(tournament: Tournament, mode: EmbedMode, config: Settings) -> Ordering:
    """Exact median up to EXACT_MEDIAN_CAP, local search up to LOCAL_SEARCH_CAP, then the identity."""
    n = tournament.n
    if n <= config.EXACT_MEDIAN_CAP:
        return exact_median(tournament, cap=config.EXACT_MEDIAN_CAP)
    if n <= config.LOCAL_SEARCH_CAP:
        return insertion_local_search(tournament, Ordering.identity(tournament), cap=config.LOCAL_SEARCH_CAP)
    if mode is EmbedMode.GUARANTEED:
        raise CapacityError(
            f"guaranteed mode needs a locally optimal ordering; n={n} exceeds LOCAL_SEARCH_CAP={config.LOCAL_SEARCH_CAP}"
        )
    logger.warning(f"n={n} is above LOCAL_SEARCH_CAP; embedding along the identity ordering.")
    return Ordering.identity(tournament, scored=False)


def embed_power_path(
    tournament: Tournament,
    params: EmbedParams,
    mode: EmbedMode = EmbedMode.HEURISTIC,
    config: Optional[Settings] = None,
) -> Tuple[PowerPathWitness, EmbedTrace]:
    """
    Builds the k-th power of a path chunk by chunk along a (locally) median
    ordering: each claim step contributes a transitive k-chunk whose
    common out-neighbours seed the next window, and a final transitive
    (2k+1)-chunk closes the path. The witness is verified in block-transitive
    mode before it is returned.

    Above LOCAL_SEARCH_CAP no local search runs: heuristic mode embeds along
    the identity ordering and relies on the per-step degree check, while
    guaranteed mode raises CapacityError.

    Raises:
        InvalidParameterError: Guaranteed mode with non-default parameters.
        InternalContractError: Guaranteed mode step failure or an unverifiable witness.
        CapacityError: Guaranteed mode above LOCAL_SEARCH_CAP.
    """
    mode = EmbedMode(mode)
    config = config or load_config()
    k = params.k
    n = tournament.n
    trace = EmbedTrace(t=params.t, blocks=params.blocks)

    if mode is EmbedMode.GUARANTEED and not params.is_default:
        raise InvalidParameterError("guaranteed mode requires the default t, a_star and blocks")
    # a_star = 2^(2k) in guaranteed mode, the threshold below which the bound is trivial
    if n < params.a_star:
        logger.info(f"n={n} is below the trivial threshold {params.a_star}; returning one vertex.")
        witness = PowerPathWitness(k=k, mode=WitnessMode.BLOCK_TRANSITIVE, vertices=[0])
        trace.final_chunk = [0]
        return witness, trace

    ordering = _embedding_ordering(tournament, mode, config)
    i = params.a_star
    a_set = list(ordering.window(1, params.a_star + 1))
    vertices: List[int] = []
    partial = False
    s = 0
    while i <= n - params.span:
        try:
            result = claim_step(tournament, ordering, i, a_set, params)
        except PathPowerError as e:
            if mode is EmbedMode.GUARANTEED:
                raise InternalContractError(f"claim step {s} failed in guaranteed mode: {e}") from e
            logger.warning(f"Claim step {s} at i={i} failed ({e}); returning a partial witness.")
            partial = True
            break
        trace.steps.append(StepRecord(s=s, i=i, a_set=tuple(sorted(a_set)), chunk=tuple(result.chunk), j=result.j))
        logger.debug(f"Step {s}: i={i} chunk={result.chunk} j={result.j}")
        vertices.extend(result.chunk)
        i, a_set = result.j, result.next_a
        s += 1

    closing = greedy_transitive(tournament, a_set)
    if len(closing) < 2 * k + 1 and mode is EmbedMode.GUARANTEED:
        raise InternalContractError(f"final window holds only {len(closing)} transitive vertices")
    trace.final_chunk = closing[:2 * k + 1]
    vertices.extend(trace.final_chunk)

    witness = PowerPathWitness(k=k, mode=WitnessMode.BLOCK_TRANSITIVE, vertices=vertices, partial=partial)
    if not witness.verify(tournament):
        raise InternalContractError("embedded sequence failed block-transitive verification")
    problems = trace.violations()
    if problems:
        raise InternalContractError(f"embedding trace is inconsistent: {problems[0]}")
    if mode is EmbedMode.GUARANTEED and len(vertices) - 1 < guaranteed_length_bound(n, k):
        raise InternalContractError(
            f"witness has {len(vertices)} vertices, below the guaranteed length {guaranteed_length_bound(n, k):.2f}"
        )
    logger.info(f"Embedded a {k}-th power path on {len(vertices)} vertices in {len(trace.steps)} steps (n={n}).")
    return witness, trace
