import json
import sys
from math import ceil, comb
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

ROOT = Path(__file__).resolve().parents[1] / "pathPowers"
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / "src"))

from embedding.kst import counting_size_threshold, counting_threshold, kst_counting_check, kst_select
from embedding.power_path import (
    EmbedMode,
    EmbedParams,
    claim_step,
    embed_power_path,
    guaranteed_length_bound,
)
from embedding.square_path import embed_square_path, hamilton_path
from extremal.oracle import longest_power_path
from tournament.graph import ExplicitTournament, ImplicitTournament, c3chain, generate, random_tournament, transitive
from tournament.ordering import Ordering
from tournament.witness import WitnessMode
from utils.config import Settings
from utils.errors import (
    InvalidParameterError,
    NotFoundError,
    NotLocallyOptimalError,
    PreconditionError,
)

SMALL = EmbedParams(k=2, t=8, a_star=5, blocks=5)
TRANSITIVE_WITNESS = [0, 1, 5, 6, 13, 14, 21, 22, 29, 30, 37, 38, 45, 46, 53, 54, 55, 56, 57]


# --- parameters ---

def test_default_parameters():
    params = EmbedParams(k=2)
    assert params.t == 2 ** 12 * 2 == 8192
    assert params.a_star == 16
    assert params.blocks == 5
    assert params.is_default
    assert not SMALL.is_default
    assert SMALL.span == 40


def test_parameter_invariants():
    with pytest.raises(ValidationError):
        EmbedParams(k=2, t=4, a_star=5, blocks=5)
    with pytest.raises(ValidationError):
        EmbedParams(k=0)
    with pytest.raises(ValidationError):
        EmbedParams(k=2, t=8, a_star=5, blocks=0)


def test_guaranteed_length_bound():
    assert guaranteed_length_bound(2 ** 15, 2) == 1.0


# --- kst ---

def test_counting_thresholds():
    assert counting_size_threshold(2) == 8192
    assert counting_threshold(2) == comb(5, 2) * 5 * 16 == 800
    for k in range(1, 6):
        assert kst_counting_check(k, counting_size_threshold(k))
    assert not kst_counting_check(2, 799)


def test_kst_planted_all_forward():
    t = transitive(25)
    selection = kst_select(t, list(range(5)), list(range(5, 25)), k=2, out_threshold=20)
    assert selection.subset == [0, 1]
    assert selection.common == list(range(5, 25))


def test_kst_not_found():
    # every A-vertex beats only the first 8 of 20 B-vertices: no pair has 15 common out-neighbours
    t = ExplicitTournament.from_edge_function(25, lambda i, j: not (i < 5 <= j and j - 5 >= 8))
    with pytest.raises(NotFoundError):
        kst_select(t, list(range(5)), list(range(5, 25)), k=2, out_threshold=15)


def test_kst_degree_precondition_names_vertex():
    t = ExplicitTournament.from_edge_function(25, lambda i, j: not (i == 3 and j >= 5))
    with pytest.raises(PreconditionError) as info:
        kst_select(t, list(range(5)), list(range(5, 25)), k=2, out_threshold=5)
    assert info.value.vertex == 3


def test_kst_rejects_malformed_sides():
    t = transitive(10)
    with pytest.raises(InvalidParameterError):
        kst_select(t, [0, 1, 2], list(range(3, 10)), k=2, out_threshold=1)
    with pytest.raises(InvalidParameterError):
        kst_select(t, list(range(5)), list(range(4, 10)), k=2, out_threshold=1)


KST_B = counting_size_threshold(2)


def _check_kst_instance(seed: int) -> None:
    t = ImplicitTournament(KST_B + 5, seed=seed)
    a_side = list(range(5))
    b_side = np.arange(5, KST_B + 5)
    degrees = [int(t.beats_many(a, b_side).sum()) for a in a_side]
    assert min(degrees) * 5 >= 2 * KST_B
    selection = kst_select(t, a_side, b_side.tolist(), k=2, out_threshold=80)
    assert len(selection.subset) == 2
    assert len(selection.common) >= 80
    common = np.asarray(selection.common)
    assert all(t.beats_many(a, common).all() for a in selection.subset)


@pytest.mark.parametrize("seed", range(3))
def test_kst_counting_quantities(seed):
    _check_kst_instance(seed)


@pytest.mark.slow
def test_kst_counting_quantities_many_seeds():
    for seed in range(1000):
        _check_kst_instance(seed)


# --- claim step ---

def test_claim_step_on_transitive():
    t = transitive(100)
    ordering = Ordering.identity(t)
    result = claim_step(t, ordering, 5, list(range(5)), SMALL)
    assert result.chunk == [0, 1]
    assert result.j == 13
    assert result.next_a == [5, 6, 7, 8, 9]


def test_claim_step_index_bound():
    t = transitive(100)
    with pytest.raises(PreconditionError):
        claim_step(t, Ordering.identity(t), 97, list(range(5)), SMALL)


def test_claim_step_window_check_names_vertex():
    t = transitive(100)
    with pytest.raises(PreconditionError) as info:
        claim_step(t, Ordering.identity(t), 5, [0, 1, 2, 3, 50], SMALL)
    assert info.value.vertex == 50


def test_claim_step_detects_non_optimal_ordering():
    # vertex 0 loses to the whole window B = [5, 45) while the identity ordering is kept
    t = ExplicitTournament.from_edge_function(100, lambda i, j: not (i == 0 and 5 <= j < 45))
    with pytest.raises(NotLocallyOptimalError):
        claim_step(t, Ordering.identity(t), 5, list(range(5)), SMALL)


# --- power path embedding ---

def test_transitive_trace_is_reproduced():
    witness, trace = embed_power_path(transitive(100), SMALL)
    assert witness.vertices == TRANSITIVE_WITNESS
    assert witness.mode is WitnessMode.BLOCK_TRANSITIVE
    assert not witness.partial
    assert [step.i for step in trace.steps] == [5, 13, 21, 29, 37, 45, 53]
    assert trace.final_chunk == [53, 54, 55, 56, 57]
    assert trace.violations() == []


def test_trace_lines_are_json():
    _, trace = embed_power_path(transitive(100), SMALL)
    lines = [json.loads(line) for line in trace.to_lines()]
    assert lines[0] == {"s": 0, "i": 5, "A": [0, 1, 2, 3, 4], "chunk": [0, 1], "j": 13}
    assert lines[-1] == {"final": [53, 54, 55, 56, 57]}
    assert len(lines) == 8


def test_guaranteed_mode_trivial_case():
    witness, trace = embed_power_path(random_tournament(15, 1), EmbedParams(k=2), mode=EmbedMode.GUARANTEED)
    assert witness.vertices == [0]
    assert trace.steps == []


def test_guaranteed_mode_requires_default_parameters():
    with pytest.raises(InvalidParameterError):
        embed_power_path(transitive(100), SMALL, mode="guaranteed")


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("seed", range(4))
def test_heuristic_witnesses_verify(k, seed):
    # reduced constants: steps may fail, but whatever is returned must verify
    params = EmbedParams(k=k, t=64, a_star=16, blocks=2 * k + 1)
    t = random_tournament(800, seed)
    witness, trace = embed_power_path(t, params)
    assert witness.verify(t)
    assert witness.partial or len(trace.steps) > 0
    assert trace.violations() == []


def test_heuristic_on_implicit_tournament():
    params = EmbedParams(k=2, t=256, a_star=16, blocks=5)
    t = generate("implicit_random", 20_000, seed=3)
    witness, trace = embed_power_path(t, params)
    assert witness.verify(t)
    assert trace.violations() == []
    assert len(trace.steps) > 10


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 3])
def test_heuristic_on_large_implicit_tournament(k):
    params = EmbedParams(k=k, t=256, a_star=16, blocks=2 * k + 1)
    t = generate("implicit_random", 200_000, seed=k)
    witness, trace = embed_power_path(t, params)
    assert witness.verify(t)
    assert trace.violations() == []


# --- square path and Hamilton path ---

def test_square_path_examples():
    assert len(embed_square_path(c3chain(3))) == 2
    assert embed_square_path(transitive(9)).vertices == list(range(9))
    assert embed_square_path(transitive(1)).vertices == [0]
    two = ExplicitTournament.from_edge_function(2, lambda i, j: False)
    assert embed_square_path(two).vertices == [1, 0]


@pytest.mark.parametrize("n", [4, 10, 30, 100])
@pytest.mark.parametrize("seed", range(5))
def test_square_path_bound(n, seed):
    t = random_tournament(n, seed)
    witness = embed_square_path(t)
    assert witness.k == 2
    assert witness.verify(t)
    assert len(witness) >= ceil(2 * n / 3)


def test_square_path_sandwich():
    for seed in range(10):
        n = 6 + seed % 7
        t = random_tournament(n, seed)
        found = len(embed_square_path(t))
        best = longest_power_path(t, 2).max_vertices
        assert ceil(2 * n / 3) <= found <= best


def test_square_path_on_implicit_input():
    t = ImplicitTournament(60, seed=8)
    witness = embed_square_path(t)
    assert witness.verify(t)
    assert len(witness) >= 40


@pytest.mark.slow
@pytest.mark.parametrize("n", [10, 30, 100, 300, 1000])
def test_square_path_statistical_run(n):
    for seed in range(100):
        t = random_tournament(n, seed)
        witness = embed_square_path(t)
        assert witness.verify(t) and len(witness) >= ceil(2 * n / 3)


def test_hamilton_path_examples():
    assert hamilton_path(transitive(5)).vertices == [0, 1, 2, 3, 4]
    witness = hamilton_path(c3chain(3))
    assert witness.k == 1 and len(witness) == 3
    assert witness.verify(c3chain(3))


@pytest.mark.parametrize("seed", range(3))
def test_hamilton_path_random(seed):
    t = random_tournament(300, seed)
    witness = hamilton_path(t)
    assert sorted(witness.vertices) == list(range(300))
    assert witness.verify(t)


@pytest.mark.slow
def test_hamilton_path_large():
    t = random_tournament(2000, 1)
    assert hamilton_path(t).verify(t)


@pytest.mark.parametrize("seed", range(2))
def test_square_and_hamilton_paths_above_local_search_cap(seed):
    config = Settings(EXACT_MEDIAN_CAP=10, LOCAL_SEARCH_CAP=30)
    for t in (random_tournament(60, seed), ImplicitTournament(60, seed=seed)):
        square = embed_square_path(t, config)
        assert square.verify(t)
        assert len(square) >= 40
        path = hamilton_path(t, config)
        assert sorted(path.vertices) == list(range(60))
        assert path.verify(t)
