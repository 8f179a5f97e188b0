"""Test data builders."""

import math
from typing import Iterable, Optional

import numpy as np

from src.models.decoding import Metric
from src.models.estimate import EstimateRecord, EstimationMethod
from src.models.noise import NoiseModel
from src.services.lattice import CodeGeometry, ErrorPattern


def make_record(
    L: int,
    P: float,
    rate: float = 0.001,
    variant: Metric = Metric.STANDARD,
    n: int = 1000,
    seed: int = 0,
) -> EstimateRecord:
    """Estimate record with a degenerate interval at P."""
    return EstimateRecord(
        L=L,
        model=NoiseModel.IID,
        p=rate,
        variant=variant,
        method=EstimationMethod.DIRECT,
        n=n,
        failures=int(round(P * n)),
        P=P,
        ci_lo=P,
        ci_hi=P,
        seed=seed,
    )


def scaling_records(
    L_values: Iterable[int],
    alpha: float = 1.0,
    beta: float = math.log(2) / math.log(3),
    c: float = 0.25,
    rate: float = 0.001,
    noise: float = 0.0,
    seed: int = 0,
) -> list[EstimateRecord]:
    """Records following P = exp(-alpha (c L)^beta), optionally with multiplicative noise."""
    gen = np.random.default_rng(seed)
    records = []
    for L in L_values:
        P = math.exp(-alpha * (c * L) ** beta)
        if noise:
            P *= 1.0 + noise * gen.uniform(-1.0, 1.0)
        records.append(make_record(L, P, rate=rate))
    return records


def crossing_records(
    L_values: Iterable[int],
    rates: Iterable[float],
    crossing: float,
) -> list[EstimateRecord]:
    """Log-linear P(rate) curves whose slopes grow with L and all pass through `crossing`."""
    records = []
    for L in L_values:
        for rate in rates:
            P = 0.1 * math.exp(L * (rate - crossing))
            records.append(make_record(L, P, rate=rate))
    return records


def random_pattern(geom: CodeGeometry, p: float, gen: np.random.Generator) -> ErrorPattern:
    return gen.random(geom.num_qubits) < p


def horizontal_pattern(geom: CodeGeometry, row: int, columns: Iterable[int], extra: Optional[Iterable[int]] = None) -> ErrorPattern:
    """H(row, c) errors at the given columns plus any extra qubit ids."""
    ids = [geom.H(row, c) for c in columns] + list(extra or [])
    return geom.pattern(ids)
