"""Tests for error pattern generators."""

import numpy as np
import pytest
from scipy import stats

from src.models.decoding import DecoderConfig, Metric
from src.models.noise import NoiseConfig, NoiseModel
from src.services.decoder import decode_pattern
from src.services.lattice import build_geometry, pattern_to_ids
from src.services.noise import (
    cantor_pattern,
    cantor_width,
    derive_stream,
    expected_flip_fraction,
    sample,
    sample_correlated,
    sample_iid,
    uniform_cluster_width,
)
from src.utils.errors import LatticeTooSmallError
from tests.fixtures.traces import CANTOR_L12, CANTOR_L15, CANTOR_L20_RELATIVE


@pytest.mark.unit
def test_derive_stream_is_reproducible():
    """Test that the same (seed, context) replays the same draws."""
    a = derive_stream(42, (1, 2, 3)).random(8)
    b = derive_stream(42, (1, 2, 3)).random(8)
    assert np.array_equal(a, b)


@pytest.mark.unit
def test_derive_stream_contexts_are_distinct():
    """Test that neighbouring contexts and seeds give different streams."""
    base = derive_stream(42, (1, 2, 3)).random(8)
    assert not np.array_equal(base, derive_stream(42, (1, 2, 4)).random(8))
    assert not np.array_equal(base, derive_stream(43, (1, 2, 3)).random(8))
    assert not np.array_equal(base, derive_stream(42, (1, 2)).random(8))


@pytest.mark.unit
@pytest.mark.parametrize("context", [(), (0,), (3, 1, 4)])
def test_derive_stream_is_uniform(context):
    """Test 10^6 uniform draws against 100 equal bins."""
    draws = derive_stream(2024, context).random(1_000_000)
    observed, _ = np.histogram(draws, bins=100, range=(0.0, 1.0))
    _, p_value = stats.chisquare(observed)
    assert p_value > 1e-4
    assert 0.0 <= draws.min() and draws.max() < 1.0


@pytest.mark.unit
def test_iid_extremes(geom3):
    """Test p=0 gives nothing and p=1 flips every qubit."""
    assert not sample_iid(geom3, 0.0, derive_stream(1)).any()
    assert sample_iid(geom3, 1.0, derive_stream(1)).all()


@pytest.mark.unit
def test_iid_flip_fraction():
    """Test the empirical flip fraction over many qubits."""
    geom = build_geometry(40)
    error = sample_iid(geom, 0.1, derive_stream(5))
    assert abs(error.mean() - 0.1) < 0.02


@pytest.mark.unit
def test_iid_weights_follow_binomial(geom3):
    """Test the weight distribution against Binomial(Q, p) over 10^5 draws."""
    stream = derive_stream(13)
    weights = np.array([sample_iid(geom3, 0.1, stream).sum() for _ in range(100_000)])
    top = 7
    observed = np.bincount(np.minimum(weights, top), minlength=top + 1)
    expected = stats.binom.pmf(np.arange(top + 1), geom3.num_qubits, 0.1)
    expected[top] = stats.binom.sf(top - 1, geom3.num_qubits, 0.1)
    _, p_value = stats.chisquare(observed, expected * len(weights))
    assert p_value > 1e-3


@pytest.mark.unit
def test_correlated_with_q_zero_matches_iid():
    """Test that q=0 reproduces the i.i.d. pattern of the same stream."""
    geom = build_geometry(9)
    iid = sample_iid(geom, 0.2, derive_stream(11, (4,)))
    correlated = sample_correlated(geom, 0.2, 0.0, derive_stream(11, (4,)))
    assert np.array_equal(iid, correlated)


@pytest.mark.unit
def test_correlated_secondaries_are_neighbours():
    """Test that every extra flip sits next to a primary flip."""
    geom = build_geometry(9)
    primary = sample_iid(geom, 0.05, derive_stream(3))
    full = sample_correlated(geom, 0.05, 1.0, derive_stream(3))
    extra = np.flatnonzero(full & ~primary)
    assert len(extra) > 0
    for q in extra:
        assert any(primary[n] for n in geom.neighbours[q])


@pytest.mark.unit
def test_correlated_flip_fraction_near_effective_rate():
    """Test that the flip fraction is close to (1 + q) p'."""
    geom = build_geometry(60)
    error = sample_correlated(geom, 0.02, 0.5, derive_stream(8))
    assert expected_flip_fraction(0.02, 0.5) == pytest.approx(0.03)
    assert abs(error.mean() - 0.03) < 0.008


@pytest.mark.unit
def test_sample_dispatches_on_model(geom3, iid_noise, correlated_noise):
    """Test that sample() follows the model tag."""
    assert np.array_equal(
        sample(geom3, iid_noise, derive_stream(7, (0,))),
        sample_iid(geom3, iid_noise.p, derive_stream(7, (0,))),
    )
    assert np.array_equal(
        sample(geom3, correlated_noise, derive_stream(7, (0,))),
        sample_correlated(geom3, correlated_noise.p_prime, correlated_noise.q, derive_stream(7, (0,))),
    )


@pytest.mark.unit
@pytest.mark.parametrize("n,width", [(0, 1), (1, 2), (2, 5), (3, 14), (4, 41)])
def test_cantor_width_recurrence(n, width):
    """Test w_n = 3 w_{n-1} - 1 with w_0 = 1."""
    assert cantor_width(n) == width
    if n:
        assert cantor_width(n) == 3 * cantor_width(n - 1) - 1


@pytest.mark.unit
def test_uniform_cluster_width():
    """Test (2m - 1)^n and its argument checks."""
    assert uniform_cluster_width(2, 3) == 27
    assert uniform_cluster_width(3, 0) == 1
    with pytest.raises(ValueError):
        uniform_cluster_width(1, 2)


@pytest.mark.unit
def test_cantor_level2_at_l12(geom12):
    """Test the centred level-2 cluster: four errors that defeat the standard decoder."""
    error, spec = cantor_pattern(geom12, 2, 0)
    assert spec.start_col == CANTOR_L12["start_col"]
    assert spec.columns == CANTOR_L12["columns"]
    assert spec.error_count == 4
    assert spec.width == 5
    assert pattern_to_ids(error) == [geom12.H(0, c) for c in CANTOR_L12["columns"]]


@pytest.mark.unit
def test_cantor_level2_at_l15_shifted(geom15):
    """Test the shifted cluster that only the shortcut metric corrects."""
    error, spec = cantor_pattern(geom15, 2, 4, start_col=CANTOR_L15["start_col"])
    assert spec.columns == CANTOR_L15["columns"]
    _, failed = decode_pattern(geom15, error, DecoderConfig(metric=Metric.SHORTCUT))
    assert not failed


@pytest.mark.unit
def test_cantor_level1_at_l4():
    """Test the two-error cluster at L=4."""
    error, spec = cantor_pattern(build_geometry(4), 1, 1)
    assert spec.columns == [0, 1]
    assert error.sum() == 2


@pytest.mark.unit
def test_cantor_level3_at_l20():
    """Test the eight-error cluster at L=20."""
    _, spec = cantor_pattern(build_geometry(20), 3, 10)
    assert spec.start_col == 2
    assert spec.columns == [2 + c for c in CANTOR_L20_RELATIVE]
    assert spec.error_count == 8


@pytest.mark.unit
def test_cantor_does_not_fit(geom3):
    """Test that a level-2 cluster at L=5 is out of the grid."""
    with pytest.raises(LatticeTooSmallError):
        cantor_pattern(build_geometry(5), 2, 0)
    with pytest.raises(LatticeTooSmallError):
        cantor_pattern(geom3, 0, 3)


@pytest.mark.unit
def test_cantor_rejects_corrected_placement(geom15):
    """Test that a placement the standard decoder corrects is refused when validating."""
    with pytest.raises(LatticeTooSmallError):
        cantor_pattern(geom15, 0, 0)
    error, spec = cantor_pattern(geom15, 0, 0, validate=False)
    assert spec.columns == [6]
    assert error.sum() == 1


@pytest.mark.unit
def test_noise_config_rejects_mixed_parameters():
    """Test that parameters of the other model are refused."""
    with pytest.raises(ValueError):
        NoiseConfig(model=NoiseModel.IID, p=0.1, q=0.5)
    with pytest.raises(ValueError):
        NoiseConfig(model=NoiseModel.CORRELATED, p=0.1)
    assert NoiseConfig(model=NoiseModel.CORRELATED, p_prime=0.02, q=0.5).rate == 0.02
