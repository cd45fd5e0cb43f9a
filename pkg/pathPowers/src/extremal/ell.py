# src/extremal/ell.py
from dataclasses import dataclass
from typing import List, Optional

from extremal.oracle import dfs_longest
from tournament.graph import ExplicitTournament, triangle_size
from utils.config import Settings, load_config
from utils.errors import CapacityError, InvalidParameterError
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class EllResult:
    n: int
    k: int
    value: int
    extremal_index: int
    enumerated: int

    def extremal_tournament(self) -> ExplicitTournament:
        return tournament_from_index(self.n, self.extremal_index)


def _pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def masks_from_index(n: int, index: int, pairs=None) -> List[int]:
    """Out-neighbourhood bitsets of the labeled tournament whose upper-triangle bits spell `index`."""
    masks = [0] * n
    for p, (i, j) in enumerate(pairs if pairs is not None else _pairs(n)):
        if (index >> p) & 1:
            masks[i] |= 1 << j
        else:
            masks[j] |= 1 << i
    return masks


def tournament_from_index(n: int, index: int) -> ExplicitTournament:
    bits = [(index >> p) & 1 for p in range(triangle_size(n))]
    return ExplicitTournament.from_upper_bits(n, bits)


def ell_exact_search(
    n: int,
    k: int,
    long_run: bool = False,
    shards: int = 1,
    shard_index: int = 0,
    config: Optional[Settings] = None,
) -> EllResult:
    """
    Minimum over all labeled n-vertex tournaments (of this shard) of the
    longest k-th power path. Each tournament is only searched up to the
    current minimum: finding a path that long settles it, otherwise the
    exhaustive search returns its exact, smaller, value.

    Raises:
        CapacityError: If n exceeds ELL_EXACT_CAP (ELL_EXACT_LONG_CAP with long_run).
    """
    config = config or load_config()
    if k < 1 or n < 1:
        raise InvalidParameterError(f"ell_exact needs n >= 1 and k >= 1, got n={n}, k={k}")
    if not 0 <= shard_index < shards:
        raise InvalidParameterError(f"shard index {shard_index} outside [0, {shards})")
    cap = config.ELL_EXACT_LONG_CAP if long_run else config.ELL_EXACT_CAP
    if n > cap:
        hint = "" if long_run else " (pass the long-run flag for larger n)"
        raise CapacityError(f"ell_exact is capped at n={cap}{hint}, got n={n}")

    pairs = _pairs(n)
    total = 1 << len(pairs)
    best = n + 1
    best_index = -1
    count = 0
    for index in range(shard_index, total, shards):
        result = dfs_longest(masks_from_index(n, index, pairs), k, stop_at=best)
        count += 1
        if result.max_vertices < best:
            best, best_index = result.max_vertices, index
            logger.debug(f"ell_{k}({n}) <= {best} witnessed by tournament #{index}")
        if count % 100_000 == 0:
            logger.info(f"ell_{k}({n}): {count} tournaments scanned, current minimum {best}")

    logger.info(f"ell_{k}({n}) over {count} tournaments (shard {shard_index}/{shards}): {best}")
    return EllResult(n=n, k=k, value=best, extremal_index=best_index, enumerated=count)


def ell_exact(n: int, k: int, long_run: bool = False, config: Optional[Settings] = None) -> int:
    """Largest m such that every n-vertex tournament contains a k-th power path on m vertices."""
    return ell_exact_search(n, k, long_run=long_run, config=config).value
