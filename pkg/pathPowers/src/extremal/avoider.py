# src/extremal/avoider.py
import json
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from extremal.bounds import avoider_block_size
from extremal.oracle import longest_power_path
from tournament.constructions import compose_chain
from tournament.graph import MASK64, ExplicitTournament, mix64, c3chain, induced, random_tournament, relabel
from tournament.serialization import parse, serialize
from utils.config import Settings, load_config
from utils.errors import (
    CapacityError,
    InvalidCertificateError,
    InvalidParameterError,
    ParseError,
    VerificationError,
)
from utils.logger import get_logger

logger = get_logger(__name__)


class CertificateMeta(BaseModel):
    """The JSON line that follows the tournament in a certificate file."""
    k: int = Field(ge=1)
    m: int = Field(ge=1)
    verified: bool
    seed: Optional[int] = None

    model_config = ConfigDict(frozen=True)


@dataclass(frozen=True)
class AvoiderCertificate:
    """
    A tournament claimed to contain no k-th power path on m vertices.
    `verified` is set only after the oracle confirmed the claim.
    """
    tournament: ExplicitTournament
    k: int
    m: int
    verified: bool
    seed: Optional[int] = None

    def to_text(self) -> str:
        meta = CertificateMeta(k=self.k, m=self.m, verified=self.verified, seed=self.seed)
        return serialize(self.tournament) + meta.model_dump_json() + "\n"

    @classmethod
    def from_text(cls, text: str) -> 'AvoiderCertificate':
        lines = text.rstrip("\n").split("\n")
        if len(lines) < 2:
            raise ParseError("certificate needs a tournament and a metadata line", line=len(lines) + 1)
        try:
            meta = CertificateMeta.model_validate_json(lines[-1])
        except ValidationError as e:
            raise ParseError(f"malformed certificate metadata: {e.errors()[0]['msg']}", line=len(lines)) from None
        tournament = parse("\n".join(lines[:-1]) + "\n")
        return cls(tournament=tournament, k=meta.k, m=meta.m, verified=meta.verified, seed=meta.seed)


@dataclass(frozen=True)
class AvoiderSearchResult:
    certificate: Optional[AvoiderCertificate]
    trials: int
    shortest_seen: int

    @property
    def found(self) -> bool:
        return self.certificate is not None


@dataclass(frozen=True)
class UpperBoundCertificate:
    tournament: ExplicitTournament
    k: int
    bound: int
    block_sizes: List[int]
    oracle_value: Optional[int]

    @property
    def oracle_checked(self) -> bool:
        return self.oracle_value is not None

    def to_line(self) -> str:
        return json.dumps(
            {"k": self.k, "n": self.tournament.n, "bound": self.bound,
             "blocks": self.block_sizes, "oracle": self.oracle_value},
            separators=(",", ":"),
        )


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed; `gen --model random --seed <trial_seed>` reproduces the sample."""
    return mix64((seed & MASK64) ^ mix64(trial))


def certify_avoider(tournament: ExplicitTournament, k: int, m: int, seed: Optional[int] = None,
                    config: Optional[Settings] = None) -> AvoiderCertificate:
    """Runs the oracle (stopping at m vertices) and records whether the tournament avoids m."""
    result = longest_power_path(tournament, k, stop_at=m, config=config)
    return AvoiderCertificate(tournament=tournament, k=k, m=m, verified=result.max_vertices < m, seed=seed)


def triangle_certificate() -> AvoiderCertificate:
    """The cyclic triangle: no square path on 3 vertices."""
    return certify_avoider(c3chain(3), k=2, m=3)


def search_avoider(
    k: int,
    m: int,
    trials: Optional[int] = None,
    seed: int = 0,
    shards: int = 1,
    shard_index: int = 0,
    config: Optional[Settings] = None,
) -> AvoiderSearchResult:
    """
    Samples random tournaments on 2^(k-1) vertices until one has no k-th
    power path on m vertices. Each sample's search stops as soon as m
    vertices are reached. Running out of trials is reported, not raised.

    Raises:
        InvalidParameterError: If k < 1, m < 2 or the shard is malformed.
    """
    config = config or load_config()
    trials = config.AVOIDER_TRIALS if trials is None else trials
    if k < 1 or m < 2:
        raise InvalidParameterError(f"search_avoider needs k >= 1 and m >= 2, got k={k}, m={m}")
    if not 0 <= shard_index < shards:
        raise InvalidParameterError(f"shard index {shard_index} outside [0, {shards})")
    if k <= 4:
        logger.warning(f"k={k}: the probabilistic avoider bound is vacuous for k <= 4.")
    n = avoider_block_size(k)
    if n > config.ORACLE_CAP:
        raise CapacityError(f"avoider blocks have {n} vertices, above ORACLE_CAP={config.ORACLE_CAP}")

    shortest = n + 1
    ran = 0
    for trial in range(shard_index, trials, shards):
        ran += 1
        sample_seed = trial_seed(seed, trial)
        tournament = random_tournament(n, sample_seed)
        result = longest_power_path(tournament, k, stop_at=m, config=config)
        shortest = min(shortest, result.max_vertices)
        if result.max_vertices < m:
            logger.info(f"✅ Avoider found at trial {trial}: longest {k}-th power path has {result.max_vertices} < {m} vertices.")
            cert = AvoiderCertificate(tournament=tournament, k=k, m=m, verified=True, seed=sample_seed)
            return AvoiderSearchResult(certificate=cert, trials=ran, shortest_seen=result.max_vertices)
        if ran % 1000 == 0:
            logger.info(f"Avoider search k={k} m={m}: {ran} trials, shortest longest path {shortest}.")

    logger.warning(f"No avoider for k={k}, m={m} within {ran} trials.")
    return AvoiderSearchResult(certificate=None, trials=ran, shortest_seen=shortest)


def reverify_certificate(cert: AvoiderCertificate, seed: int = 1, config: Optional[Settings] = None) -> bool:
    """Relabels the tournament by a seeded random permutation and reruns the oracle."""
    perm = np.random.default_rng(seed & MASK64).permutation(cert.tournament.n)
    relabeled = relabel(cert.tournament, perm)
    return longest_power_path(relabeled, cert.k, stop_at=cert.m, config=config).max_vertices < cert.m


def certify_upper_bound(
    k: int,
    n: int,
    block: AvoiderCertificate,
    config: Optional[Settings] = None,
) -> UpperBoundCertificate:
    """
    Chains ceil(n / b) copies of a b-vertex avoider block (the last one
    truncated to the first remaining vertices), every earlier block beating
    every later one. A power path meets each block in a power path of that
    block, so it has at most sum(min(size, m - 1)) vertices. Small
    compositions are re-checked by the oracle.

    Raises:
        InvalidCertificateError: If the block is unverified or for another k.
        InvalidParameterError: If n is smaller than the block.
        VerificationError: If the oracle finds a longer path than claimed.
    """
    config = config or load_config()
    if not block.verified:
        raise InvalidCertificateError("certify_upper_bound needs a verified avoider block")
    if block.k != k:
        raise InvalidCertificateError(f"block certifies k={block.k}, requested k={k}")
    size = block.tournament.n
    if n < size:
        raise InvalidParameterError(f"n={n} is smaller than the block size {size}")

    full, rest = divmod(n, size)
    blocks = [block.tournament] * full
    if rest:
        blocks.append(induced(block.tournament, list(range(rest))))
    composed = compose_chain(blocks)
    sizes = [b.n for b in blocks]
    bound = sum(min(s, block.m - 1) for s in sizes)

    recheck_cap = config.ORACLE_CAP_SQUARE if k == 2 else config.ORACLE_RECHECK_CAP
    oracle_value = None
    if n <= recheck_cap:
        oracle_value = longest_power_path(composed, k, config=config).max_vertices
        if oracle_value > bound:
            raise VerificationError(f"composition has a {k}-th power path on {oracle_value} > {bound} vertices")
        logger.info(f"Upper bound {bound} for k={k}, n={n} confirmed by oracle ({oracle_value}).")
    else:
        logger.info(f"Upper bound {bound} for k={k}, n={n} derived from the composition; oracle check skipped.")
    return UpperBoundCertificate(
        tournament=composed, k=k, bound=bound, block_sizes=sizes, oracle_value=oracle_value,
    )
