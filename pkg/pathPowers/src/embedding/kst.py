# src/embedding/kst.py
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Sequence

import numpy as np

from tournament.graph import Tournament
from utils.errors import InternalContractError, InvalidParameterError, NotFoundError, PreconditionError
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class KstSelection:
    subset: List[int]
    common: List[int]


def counting_size_threshold(k: int) -> int:
    """|B| required by the counting argument: 2^(4k+4) * k."""
    return 2 ** (4 * k + 4) * k


def counting_threshold(k: int) -> int:
    """
    Smallest |B| at which the double count rules out failure:
    C(2k+1, k) * (2k+1) * 2^(2k). Any |B| at or above it, together with the
    degree condition, forces a k-subset with (2k+1) * 2^(2k) common
    out-neighbours.
    """
    return comb(2 * k + 1, k) * (2 * k + 1) * 4 ** k


def kst_counting_check(k: int, b: int) -> bool:
    """True iff |B| = b is large enough for the counting contradiction."""
    return b >= counting_threshold(k)


def kst_select(
    tournament: Tournament,
    a_side: Sequence[int],
    b_side: Sequence[int],
    k: int,
    out_threshold: int,
) -> KstSelection:
    """
    Scans the k-subsets of A in lexicographic order and returns the first
    whose common out-neighbourhood in B has at least `out_threshold` vertices.

    Every vertex of A must have at least (1 - 1/(2k+1)) |B| / 2 = k|B|/(2k+1)
    out-neighbours in B.

    Raises:
        InvalidParameterError: If |A| != 2k+1 or A and B intersect.
        PreconditionError: Naming the first vertex of A below the degree bound.
        NotFoundError: If no subset reaches the threshold.
    """
    if k < 1:
        raise InvalidParameterError(f"power order must be >= 1, got {k}")
    if len(a_side) != 2 * k + 1:
        raise InvalidParameterError(f"A must have 2k+1 = {2 * k + 1} vertices, got {len(a_side)}")
    if set(a_side) & set(b_side):
        raise InvalidParameterError("A and B must be disjoint")

    b_arr = np.asarray(b_side, dtype=np.int64)
    rows = np.vstack([tournament.beats_many(int(a), b_arr) for a in a_side]) if len(b_arr) else np.zeros((len(a_side), 0), bool)
    degrees = rows.sum(axis=1)
    for a, d in zip(a_side, degrees):
        # d >= k|B|/(2k+1) in integers
        if int(d) * (2 * k + 1) < k * len(b_arr):
            raise PreconditionError(
                f"vertex {a} has {int(d)} out-neighbours in B, needs at least {k * len(b_arr) / (2 * k + 1):.1f}",
                vertex=int(a),
            )

    for combo in combinations(range(len(a_side)), k):
        common = np.logical_and.reduce(rows[list(combo)], axis=0)
        if int(common.sum()) >= out_threshold:
            return KstSelection(
                subset=[int(a_side[c]) for c in combo],
                common=[int(v) for v in b_arr[common]],
            )

    if kst_counting_check(k, len(b_arr)) and out_threshold <= (2 * k + 1) * 4 ** k:
        raise InternalContractError(
            f"no {k}-subset reached {out_threshold} common out-neighbours although |B|={len(b_arr)} "
            "satisfies the counting bound"
        )
    raise NotFoundError(f"no {k}-subset of A has {out_threshold} common out-neighbours in B")
