"""Shared pytest fixtures and configuration."""

import os

import pytest

# Keep the settings layer deterministic regardless of a developer's .env
os.environ.setdefault("HDRG_DEFAULT_SEED", "0")
os.environ.setdefault("HDRG_BATCH_SIZE", "64")
os.environ.setdefault("LOG_LEVEL", "WARNING")

from src.models.decoding import DecoderConfig, Metric  # noqa: E402
from src.models.noise import NoiseConfig, NoiseModel  # noqa: E402
from src.services.lattice import CodeGeometry, build_geometry  # noqa: E402
from src.services.noise import derive_stream  # noqa: E402


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run acceptance-scale Monte Carlo tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def geom2() -> CodeGeometry:
    return build_geometry(2)


@pytest.fixture
def geom3() -> CodeGeometry:
    return build_geometry(3)


@pytest.fixture
def geom12() -> CodeGeometry:
    return build_geometry(12)


@pytest.fixture
def geom15() -> CodeGeometry:
    return build_geometry(15)


@pytest.fixture
def standard() -> DecoderConfig:
    return DecoderConfig(metric=Metric.STANDARD)


@pytest.fixture
def shortcut() -> DecoderConfig:
    return DecoderConfig(metric=Metric.SHORTCUT)


@pytest.fixture(params=[Metric.STANDARD, Metric.SHORTCUT], ids=["standard", "shortcut"])
def any_config(request) -> DecoderConfig:
    """Both decoder variants."""
    return DecoderConfig(metric=request.param)


@pytest.fixture
def iid_noise() -> NoiseConfig:
    return NoiseConfig(model=NoiseModel.IID, p=0.1, seed=7)


@pytest.fixture
def correlated_noise() -> NoiseConfig:
    return NoiseConfig(model=NoiseModel.CORRELATED, p_prime=0.05, q=0.5, seed=7)


@pytest.fixture
def rng():
    """Deterministic random stream for building test inputs."""
    return derive_stream(12345, (99,))
