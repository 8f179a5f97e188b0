"""Exhaustive small-lattice ground truth: exact failure rates and minimum failing weights."""

import math
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from src.models.decoding import DecoderConfig
from src.models.oracle import OracleReport
from src.services.decoder import decode_pattern
from src.services.lattice import CodeGeometry, build_geometry, cut_parity, syndrome_of
from src.utils.errors import OracleTooLargeError
from src.utils.logging import get_structured_logger, log_timing, timed
from src.utils.settings import Settings

logger = get_structured_logger(__name__)


def _check_size(geom: CodeGeometry, max_qubits: int) -> None:
    if geom.num_qubits > max_qubits:
        raise OracleTooLargeError(
            f"L={geom.L} has {geom.num_qubits} qubits; enumeration limited to {max_qubits}"
        )


def _failures_at_weight(L: int, weight: int, config: DecoderConfig) -> int:
    geom = build_geometry(L)
    failures = 0
    for combo in combinations(range(geom.num_qubits), weight):
        error = geom.empty_pattern()
        error[list(combo)] = True
        _, failed = decode_pattern(geom, error, config)
        failures += failed
    return failures


def failure_counts_by_weight(
    geom: CodeGeometry,
    config: Optional[DecoderConfig] = None,
    workers: int = 1,
    max_qubits: Optional[int] = None,
) -> list[int]:
    """Number of failing patterns at every weight 0..Q.

    Shards are whole weight layers; the reduction is by weight so the result
    does not depend on the number of workers.
    """
    config = config or DecoderConfig()
    _check_size(geom, max_qubits or Settings.ORACLE_MAX_QUBITS)
    weights = range(geom.num_qubits + 1)
    with log_timing("failure_counts_by_weight", logger=logger, L=geom.L, metric=config.metric.value):
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                counts = list(pool.map(_failures_at_weight, [geom.L] * len(weights), weights, [config] * len(weights)))
        else:
            counts = [_failures_at_weight(geom.L, w, config) for w in weights]
    return counts


def exact_failure_rate(
    geom: CodeGeometry,
    p: float,
    config: Optional[DecoderConfig] = None,
    counts: Optional[Sequence[int]] = None,
) -> float:
    """Exact logical failure probability under i.i.d. flips with probability p."""
    if counts is None:
        counts = failure_counts_by_weight(geom, config)
    Q = geom.num_qubits
    return math.fsum(f * p**w * (1.0 - p) ** (Q - w) for w, f in enumerate(counts) if f)


def min_weight_failure(
    geom: CodeGeometry,
    config: Optional[DecoderConfig] = None,
    w_max: Optional[int] = None,
) -> Optional[tuple[int, list[int]]]:
    """Smallest weight with a failing pattern and the lexicographically first witness."""
    config = config or DecoderConfig()
    w_max = geom.L if w_max is None else w_max
    for weight in range(1, w_max + 1):
        for combo in combinations(range(geom.num_qubits), weight):
            error = geom.empty_pattern()
            error[list(combo)] = True
            _, failed = decode_pattern(geom, error, config)
            if failed:
                logger.info("Minimum failing weight found", L=geom.L, weight=weight, witness=list(combo))
                return weight, list(combo)
    return None


@timed("ml_min_weight")
def ml_min_weight(geom: CodeGeometry, w_max: Optional[int] = None) -> Optional[int]:
    """Smallest weight at which any decoder must fail.

    A weight-w pattern defeats every decoder when a pattern of weight <= w
    with the same syndrome lies in the other logical class (opposite
    left-cut parity). Layers are enumerated in increasing weight so the
    best-known weight per (syndrome, class) is always <= the current layer.
    """
    w_max = geom.L if w_max is None else w_max
    seen: set[tuple[bytes, int]] = set()
    for weight in range(0, w_max + 1):
        layer: list[tuple[bytes, int]] = []
        for combo in combinations(range(geom.num_qubits), weight):
            error = geom.empty_pattern()
            error[list(combo)] = True
            key = np.packbits(syndrome_of(geom, error)).tobytes()
            layer.append((key, cut_parity(geom, error, -1)))
        seen.update(layer)
        if any((key, 1 - parity) in seen for key, parity in layer):
            return weight
    return None


def oracle_report(
    geom: CodeGeometry,
    config: Optional[DecoderConfig] = None,
    p_values: Sequence[float] = (),
    w_max: Optional[int] = None,
    workers: int = 1,
) -> OracleReport:
    """Collect exact rates, the decoder's minimum failing weight and the optimal one."""
    config = config or DecoderConfig()
    counts = failure_counts_by_weight(geom, config, workers=workers) if p_values else None
    found = min_weight_failure(geom, config, w_max)
    ml = ml_min_weight(geom, w_max)
    Q = geom.num_qubits
    return OracleReport(
        L=geom.L,
        variant=config.metric,
        p_values=list(p_values),
        failure_rates=[exact_failure_rate(geom, p, config, counts) for p in p_values],
        min_failing_weight=found[0] if found else None,
        witness=found[1] if found else None,
        ml_min_weight=ml,
        failing_counts=list(counts) if counts is not None else None,
        pattern_counts=[math.comb(Q, w) for w in range(Q + 1)] if counts is not None else None,
    )
