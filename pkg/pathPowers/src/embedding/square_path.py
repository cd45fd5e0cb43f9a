# src/embedding/square_path.py
from math import ceil
from typing import List, Optional

from ordering.median import exact_median, insertion_local_search
from ordering.properties import eliminate_bad_indices
from tournament.graph import Tournament, as_explicit
from tournament.ordering import Ordering, score_ordering
from tournament.witness import PowerPathWitness, WitnessMode
from utils.config import Settings, load_config
from utils.errors import InternalContractError
from utils.logger import get_logger

logger = get_logger(__name__)


def _search_cap(n: int, config: Settings) -> int:
    """LOCAL_SEARCH_CAP, raised to n: these embeddings have no capacity error."""
    if n > config.LOCAL_SEARCH_CAP:
        logger.warning(
            f"n={n} is above LOCAL_SEARCH_CAP={config.LOCAL_SEARCH_CAP}; building the dense {n}x{n} matrix anyway."
        )
    return max(n, config.LOCAL_SEARCH_CAP)


def locally_optimal_ordering(tournament: Tournament, config: Optional[Settings] = None) -> Ordering:
    """
    Exact median ordering when affordable, otherwise local search from the
    score ordering. Above LOCAL_SEARCH_CAP the local search still runs, with
    a warning, on a materialized n x n adjacency matrix.
    """
    config = config or load_config()
    if tournament.n <= config.EXACT_MEDIAN_CAP:
        return exact_median(tournament, cap=config.EXACT_MEDIAN_CAP)
    explicit = as_explicit(tournament)
    return insertion_local_search(explicit, score_ordering(explicit), cap=_search_cap(explicit.n, config))


def square_index_set(tournament: Tournament, ordering: Ordering) -> List[int]:
    """Positions 1, 2 and every i >= 3 such that x_i -> x_{i-2} is NOT an edge."""
    return [
        i for i in range(1, ordering.n + 1)
        if i <= 2 or not tournament.orient(ordering.at(i), ordering.at(i - 2))
    ]


def embed_square_path(tournament: Tournament, config: Optional[Settings] = None) -> PowerPathWitness:
    """
    Square of a directed path on at least ceil(2n/3) vertices.

    A locally optimal ordering is cleared of bad indices; the vertices at
    positions i with x_i -> x_{i-2} absent then carry the square path. Among
    any three consecutive positions at most one is skipped, which yields the
    length bound. Works for every n: above LOCAL_SEARCH_CAP the ordering
    work runs on a dense matrix anyway (logged as a warning).
    """
    n = tournament.n
    if n <= 2:
        vertices = [0] if n == 1 else ([0, 1] if tournament.orient(0, 1) else [1, 0])
        return PowerPathWitness(k=2, vertices=vertices)

    config = config or load_config()
    tournament = as_explicit(tournament)
    ordering = eliminate_bad_indices(
        tournament, locally_optimal_ordering(tournament, config), cap=max(n, config.LOCAL_SEARCH_CAP),
    )
    index_set = square_index_set(tournament, ordering)
    members = set(index_set)
    for i in range(1, n - 1):
        if i + 2 not in members and not (i in members and i + 1 in members):
            raise InternalContractError(f"position {i + 2} is skipped but {i} or {i + 1} is skipped too")

    witness = PowerPathWitness(k=2, mode=WitnessMode.PLAIN, vertices=[ordering.at(i) for i in index_set])
    if not witness.verify(tournament):
        raise InternalContractError("square path extracted from the ordering failed verification")
    if len(witness) < ceil(2 * n / 3):
        raise InternalContractError(f"square path has {len(witness)} vertices, fewer than ceil(2n/3)")
    logger.info(f"Square path on {len(witness)} of {n} vertices (bound {ceil(2 * n / 3)}).")
    return witness


def hamilton_path(tournament: Tournament, config: Optional[Settings] = None) -> PowerPathWitness:
    """
    Every locally optimal ordering is a Hamilton path: consecutive vertices
    point forward. Like embed_square_path it raises no capacity error; above
    LOCAL_SEARCH_CAP the tournament is materialized with a warning.
    """
    ordering = locally_optimal_ordering(tournament, config)
    witness = PowerPathWitness(k=1, vertices=list(ordering.perm))
    if not witness.verify(tournament):
        raise InternalContractError("locally optimal ordering has a backward adjacent pair")
    return witness
