"""Sub-threshold scaling fits and threshold estimation from estimate records."""

import math
from collections import defaultdict
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from src.models.estimate import CrossingEstimate, EstimateRecord, FitResult
from src.services.noise import derive_stream
from src.utils.errors import InvalidFitPointError, NoCrossingError
from src.utils.logging import get_structured_logger

logger = get_structured_logger(__name__)

BETA_CANTOR = math.log(2) / math.log(3)
LENGTH_SCALE = 0.25


def _fit_points(records: Sequence[EstimateRecord]) -> tuple[float, np.ndarray, np.ndarray]:
    if len(records) < 3:
        raise InvalidFitPointError(f"need at least 3 records, got {len(records)}")
    rates = {r.rate for r in records}
    if len(rates) != 1:
        raise InvalidFitPointError(f"records must share one physical rate, got {sorted(rates)}")
    for r in records:
        if not 0.0 < r.P < 1.0:
            raise InvalidFitPointError(f"P={r.P} at L={r.L} is outside (0, 1)")
    L = np.array([r.L for r in records], dtype=float)
    P = np.array([r.P for r in records], dtype=float)
    return rates.pop(), L, P


def _r_squared(rvalue: float) -> float:
    return min(1.0, max(0.0, float(rvalue) ** 2))


def fit_beta(records: Sequence[EstimateRecord]) -> FitResult:
    """Least squares of log(-log P) against log L; the gradient is beta."""
    rate, L, P = _fit_points(records)
    fit = stats.linregress(np.log(L), np.log(-np.log(P)))
    logger.info("Beta fit", rate=rate, beta=fit.slope, r_squared=fit.rvalue**2)
    return FitResult(
        kind="beta",
        rate=rate,
        L_values=[int(x) for x in L],
        beta=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=_r_squared(fit.rvalue),
    )


def fit_alpha(
    records: Sequence[EstimateRecord],
    beta: float = BETA_CANTOR,
    c: float = LENGTH_SCALE,
    bootstrap: int = 0,
    seed: int = 0,
) -> FitResult:
    """Fit log P = intercept - alpha * (c L)^beta with beta held fixed.

    With `bootstrap` > 0, records are resampled with replacement that many
    times and the 2.5/97.5 percentiles of alpha give `alpha_ci`.
    """
    rate, L, P = _fit_points(records)
    x = (c * L) ** beta
    y = np.log(P)
    fit = stats.linregress(x, y)
    alpha = -float(fit.slope)

    alpha_ci: Optional[tuple[float, float]] = None
    if bootstrap:
        stream = derive_stream(seed, (len(records), bootstrap))
        draws = []
        for _ in range(bootstrap):
            pick = stream.integers(0, len(x), size=len(x))
            if np.unique(x[pick]).size < 2:
                continue
            draws.append(-stats.linregress(x[pick], y[pick]).slope)
        if draws:
            lo, hi = np.percentile(draws, [2.5, 97.5])
            alpha_ci = (float(lo), float(hi))

    logger.info("Alpha fit", rate=rate, alpha=alpha, r_squared=fit.rvalue**2)
    return FitResult(
        kind="alpha",
        rate=rate,
        L_values=[int(v) for v in L],
        beta=beta,
        alpha=alpha,
        intercept=float(fit.intercept),
        r_squared=_r_squared(fit.rvalue),
        c=c,
        alpha_ci=alpha_ci,
    )


def _crossing(rates: list[float], small: dict[float, float], large: dict[float, float]) -> Optional[float]:
    gaps = [math.log(large[p]) - math.log(small[p]) for p in rates]
    for i, gap in enumerate(gaps):
        if gap == 0.0:
            return rates[i]
        if i + 1 < len(gaps) and gap * gaps[i + 1] < 0:
            p0, p1 = rates[i], rates[i + 1]
            return p0 + (p1 - p0) * gap / (gap - gaps[i + 1])
    return None


def threshold_scan(records: Sequence[EstimateRecord]) -> CrossingEstimate:
    """Rate at which log P curves of adjacent lattice sizes cross.

    Each adjacent (L, L') pair is compared on the rates both were measured
    at (points with P = 0 are skipped); the first sign change of
    log P(L') - log P(L) is located by linear interpolation in the rate.
    """
    curves: dict[int, dict[float, float]] = defaultdict(dict)
    for r in records:
        if r.P > 0.0:
            curves[r.L][r.rate] = r.P
    sizes = sorted(curves)
    if len(sizes) < 2:
        raise InvalidFitPointError("threshold scan needs at least two lattice sizes with P > 0")

    crossings = []
    for small, large in zip(sizes, sizes[1:]):
        rates = sorted(set(curves[small]) & set(curves[large]))
        found = _crossing(rates, curves[small], curves[large])
        if found is None:
            logger.warning("No crossing for size pair", L_small=small, L_large=large, rates=len(rates))
            continue
        crossings.append((small, large, found))

    if not crossings:
        raise NoCrossingError(f"log P curves for L={sizes} do not cross in the scanned range")
    values = [p for _, _, p in crossings]
    estimate = CrossingEstimate(
        crossings=crossings,
        median=float(np.median(values)),
        spread=(min(values), max(values)),
    )
    logger.info("Threshold estimate", median=estimate.median, pairs=len(crossings))
    return estimate
