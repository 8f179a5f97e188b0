"""Decoder properties checked across many syndromes."""

from itertools import combinations

import numpy as np
import pytest

from src.models.decoding import DecoderConfig, Metric
from src.services import decoder as decoder_module
from src.services.decoder import decode, decode_pattern, work_bound
from src.services.lattice import Edge, build_geometry, node_distance, syndrome_from_anyons, syndrome_of
from src.services.noise import cantor_pattern
from tests.fixtures.traces import CANTOR_L12, CANTOR_L15
from tests.utils.assertions import assert_cut_consistent
from tests.utils.helpers import random_errors, random_monotone_path, residual_of

pytestmark = pytest.mark.integration


@pytest.mark.parametrize("L", range(3, 10))
def test_close_pairs_are_matched_together(L):
    """Test that two anyons nearer to each other than to any boundary are paired."""
    geom = build_geometry(L)
    coords = [geom.plaquette_coords(p) for p in range(geom.num_plaquettes)]
    for a, b in combinations(coords, 2):
        d = node_distance(geom, a, b)
        edge = min(node_distance(geom, x, e) for x in (a, b) for e in Edge)
        if d >= edge:
            continue
        for metric in Metric:
            result = decode(geom, syndrome_from_anyons(geom, [a, b]), DecoderConfig(metric=metric))
            assert len(result.pairings) == 1
            assert {result.pairings[0].a, result.pairings[0].b} == {a, b}
            assert result.pairings[0].k == d


def test_adversarial_clusters_end_to_end():
    """Test both level-2 clusters through generation and decoding."""
    geom12 = build_geometry(CANTOR_L12["L"])
    error, _ = cantor_pattern(geom12, 2, 0)
    for metric in Metric:
        _, failed = decode_pattern(geom12, error, DecoderConfig(metric=metric))
        assert failed

    geom15 = build_geometry(CANTOR_L15["L"])
    error, _ = cantor_pattern(geom15, 2, 0, start_col=CANTOR_L15["start_col"])
    outcomes = {m: decode_pattern(geom15, error, DecoderConfig(metric=m))[1] for m in Metric}
    assert outcomes == {Metric.STANDARD: True, Metric.SHORTCUT: False}


@pytest.mark.parametrize("level,L", [(1, 4), (2, 12), (3, 20)])
def test_cantor_clusters_defeat_the_standard_decoder(level, L):
    """Test weight 2^n, anyon extent w_n and failure in every row."""
    geom = build_geometry(L)
    for row in (0, L // 2, L - 1):
        error, spec = cantor_pattern(geom, level, row)
        assert decode_pattern(geom, error, DecoderConfig(metric=Metric.STANDARD))[1]
        assert error.sum() == 2**level
        anyon_cols = [c for r, c in (geom.plaquette_coords(p) for p in np.flatnonzero(syndrome_of(geom, error)))]
        assert max(anyon_cols) - min(anyon_cols) == spec.width


def test_neutralization_and_work_bound():
    """Test neutralization, cut consistency and the work bound on random errors."""
    for metric in Metric:
        config = DecoderConfig(metric=metric)
        for L, _, error in random_errors(list(range(3, 14)), [0.01, 0.05, 0.09, 0.12], 600, seed=17):
            geom = build_geometry(L)
            result = decode(geom, syndrome_of(geom, error), config)
            correction = geom.pattern(result.correction)
            assert np.array_equal(syndrome_of(geom, correction), syndrome_of(geom, error))
            assert result.examined <= work_bound(L)
            assert_cut_consistent(geom, error ^ correction)


def test_shortcut_chains_neutralize_with_nested_witnesses():
    """Test dense errors where shortcut chains route through earlier ones."""
    config = DecoderConfig(metric=Metric.SHORTCUT)
    for L, _, error in random_errors([15, 21, 25], [0.08, 0.1, 0.12], 300, seed=23):
        geom = build_geometry(L)
        residual = residual_of(geom, error, config)
        assert not syndrome_of(geom, residual).any()


@pytest.mark.slow
@pytest.mark.timeout(7200)
def test_neutralization_at_scale():
    """Test 10^5 random trials over L in 3..25 and both metrics."""
    sizes = list(range(3, 26))
    rates = [0.01, 0.03, 0.05, 0.07, 0.09, 0.12]
    for metric in Metric:
        config = DecoderConfig(metric=metric)
        for L, _, error in random_errors(sizes, rates, 50_000, seed=1):
            geom = build_geometry(L)
            residual = residual_of(geom, error, config)
            assert not syndrome_of(geom, residual).any()


def _assert_path_choice_irrelevant(metric: Metric, mocker, trials: int, seed: int) -> None:
    canonical = decoder_module.geodesic_qubits
    gen = np.random.default_rng(seed)
    randomize = [False]

    def chain(geom, a, b):
        if randomize[0]:
            return random_monotone_path(geom, a, b, gen)
        return canonical(geom, a, b)

    mocker.patch("src.services.decoder.geodesic_qubits", side_effect=chain)
    config = DecoderConfig(metric=metric, count_operations=False)
    rerouted = 0
    for L, _, error in random_errors(list(range(3, 10)), [0.03, 0.06, 0.1], trials, seed=seed):
        geom = build_geometry(L)
        randomize[0] = False
        reference, failed = decode_pattern(geom, error, config)
        randomize[0] = True
        result, failed_rerouted = decode_pattern(geom, error, config)
        assert failed_rerouted == failed
        assert [(p.a, p.b) for p in result.pairings] == [(p.a, p.b) for p in reference.pairings]
        rerouted += result.correction != reference.correction
    assert rerouted > 0


@pytest.mark.parametrize("metric", list(Metric))
def test_path_choice_does_not_change_failure(metric, mocker):
    """Test that any monotone shortest chain gives the canonical chain's outcome."""
    _assert_path_choice_irrelevant(metric, mocker, trials=1000, seed=23)


@pytest.mark.slow
@pytest.mark.timeout(7200)
@pytest.mark.parametrize("metric", list(Metric))
def test_path_choice_does_not_change_failure_at_scale(metric, mocker):
    """Test 10^4 rerouted decodes per metric."""
    _assert_path_choice_irrelevant(metric, mocker, trials=10_000, seed=29)
