"""Monte Carlo estimation of logical error rates.

Every trial draws its error from its own stream, derive_stream(seed,
context + [trial]). Trials run in batches, possibly on worker processes,
but outcomes are always consumed in trial order, so the stopping point and
every count are independent of scheduling and worker count.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Callable, Optional, Sequence

from scipy import stats

from src.models.decoding import DecoderConfig, Metric
from src.models.estimate import EstimateRecord, EstimationMethod, VariantRatio
from src.models.noise import NoiseConfig, NoiseModel
from src.services.decoder import decode_pattern
from src.services.lattice import CodeGeometry, build_geometry
from src.services.noise import derive_stream, expected_flip_fraction, sample
from src.utils.errors import UnsupportedModelError
from src.utils.logging import get_structured_logger, log_timing
from src.utils.settings import Settings

logger = get_structured_logger(__name__)


def _z(confidence: float) -> float:
    return float(stats.norm.ppf(0.5 + confidence / 2.0))


def wilson_interval(failures: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    z = _z(confidence)
    phat = failures / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = min(max(0.0, center - half), phat)
    hi = max(min(1.0, center + half), phat)
    return (lo, hi)


def zero_failure_upper(n: int, confidence: float = 0.95) -> float:
    """One-sided upper bound on P after n samples without a failure."""
    if n == 0:
        return 1.0
    return 1.0 - (1.0 - confidence) ** (1.0 / n)


def _trial_batch(
    L: int,
    noise: NoiseConfig,
    metrics: tuple[Metric, ...],
    context: tuple[int, ...],
    start: int,
    stop: int,
) -> list[tuple[bool, ...]]:
    geom = build_geometry(L)
    configs = [DecoderConfig(metric=m, count_operations=False) for m in metrics]
    outcomes = []
    for trial in range(start, stop):
        error = sample(geom, noise, derive_stream(noise.seed, (*context, trial)))
        if not error.any():
            outcomes.append((False,) * len(configs))
            continue
        outcomes.append(tuple(decode_pattern(geom, error, cfg)[1] for cfg in configs))
    return outcomes


def run_trials(
    L: int,
    noise: NoiseConfig,
    metrics: Sequence[Metric],
    context: Sequence[int],
    done: Callable[[list[int]], bool],
    max_samples: int,
    workers: int = 1,
    batch_size: Optional[int] = None,
) -> tuple[int, list[int]]:
    """Run trials in order until `done(failure_counts)` or the sample cap.

    Returns the number of trials consumed and the failure count per metric.
    """
    batch_size = batch_size or Settings.BATCH_SIZE
    metrics = tuple(metrics)
    context = tuple(int(i) for i in context)
    counts = [0] * len(metrics)
    n = 0
    next_start = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        finished = False
        while not finished and n < max_samples and not done(counts):
            jobs = []
            for _ in range(workers):
                if next_start >= max_samples:
                    break
                stop = min(next_start + batch_size, max_samples)
                jobs.append((next_start, stop))
                next_start = stop
            args = (
                [L] * len(jobs), [noise] * len(jobs), [metrics] * len(jobs), [context] * len(jobs),
                [j[0] for j in jobs], [j[1] for j in jobs],
            )
            batches = pool.map(_trial_batch, *args) if pool else map(_trial_batch, *args)
            for batch in batches:
                for outcome in batch:
                    n += 1
                    for i, failed in enumerate(outcome):
                        counts[i] += failed
                    if done(counts) or n >= max_samples:
                        finished = True
                        break
                if finished:
                    break
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return n, counts


def _record(
    geom: CodeGeometry,
    noise: NoiseConfig,
    metric: Metric,
    n: int,
    failures: int,
    P: float,
    interval: tuple[float, float],
    started: float,
    method: EstimationMethod = EstimationMethod.DIRECT,
    flagged: bool = False,
) -> EstimateRecord:
    return EstimateRecord(
        L=geom.L,
        model=noise.model,
        p=noise.p,
        p_prime=noise.p_prime,
        q=noise.q,
        variant=metric,
        method=method,
        n=n,
        failures=failures,
        P=P,
        ci_lo=interval[0],
        ci_hi=interval[1],
        flagged=flagged,
        seed=noise.seed,
        wall_time_s=round(time.perf_counter() - started, 6),
    )


def estimate_P(
    geom: CodeGeometry,
    noise: NoiseConfig,
    config: Optional[DecoderConfig] = None,
    target_failures: int = Settings.TARGET_FAILURES,
    max_samples: int = Settings.MAX_SAMPLES,
    context: Sequence[int] = (),
    workers: int = 1,
    batch_size: Optional[int] = None,
) -> EstimateRecord:
    """Sample until `target_failures` logical failures or `max_samples` trials; P = f / n."""
    config = config or DecoderConfig()
    started = time.perf_counter()
    with log_timing("estimate_P", logger=logger, L=geom.L, rate=noise.rate, metric=config.metric.value):
        n, (failures,) = run_trials(
            geom.L, noise, (config.metric,), context,
            done=lambda counts: counts[0] >= target_failures,
            max_samples=max_samples, workers=workers, batch_size=batch_size,
        )
    if failures == 0:
        logger.warning("Sample cap reached without failures", L=geom.L, rate=noise.rate, n=n)
        return _record(geom, noise, config.metric, n, 0, 0.0, (0.0, zero_failure_upper(n)),
                       started, flagged=True)
    return _record(geom, noise, config.metric, n, failures, failures / n,
                   wilson_interval(failures, n), started)


def estimate_P_stratified(
    geom: CodeGeometry,
    noise: NoiseConfig,
    config: Optional[DecoderConfig] = None,
    budget: int = Settings.STRATIFIED_BUDGET,
    tail: float = Settings.STRATIFIED_TAIL,
    context: Sequence[int] = (),
    confidence: float = 0.95,
) -> EstimateRecord:
    """P = sum_w Binom(Q, w, p) * f_w over weight strata.

    f_w is exact when the C(Q, w) weight-w patterns fit in `budget`, otherwise
    the failure fraction of `budget` uniformly drawn weight-w patterns.
    Strata are added until the remaining binomial tail P(W >= w) drops below
    `tail`; that tail is added to the upper end of the interval.
    """
    if noise.model != NoiseModel.IID:
        raise UnsupportedModelError("stratified estimation supports the IID model only")
    config = config or DecoderConfig()
    started = time.perf_counter()
    Q, p = geom.num_qubits, noise.p
    estimate = 0.0
    variance = 0.0
    n_total = 0
    failures_total = 0
    remaining = 1.0
    weight = 0

    with log_timing("estimate_P_stratified", logger=logger, L=geom.L, p=p, metric=config.metric.value):
        while weight <= Q:
            remaining = float(stats.binom.sf(weight - 1, Q, p))
            if remaining < tail:
                break
            mass = float(stats.binom.pmf(weight, Q, p))
            if math.comb(Q, weight) <= budget:
                patterns = (list(c) for c in combinations(range(Q), weight))
                exact = True
            else:
                stream = derive_stream(noise.seed, (*context, weight))
                patterns = (stream.choice(Q, size=weight, replace=False) for _ in range(budget))
                exact = False

            n_w = 0
            f_w = 0
            for qubits in patterns:
                error = geom.empty_pattern()
                error[qubits] = True
                n_w += 1
                if weight:
                    f_w += decode_pattern(geom, error, config)[1]
            fraction = f_w / n_w
            estimate += mass * fraction
            if not exact:
                variance += mass * mass * fraction * (1.0 - fraction) / n_w
            n_total += n_w
            failures_total += f_w
            logger.debug("Stratum done", L=geom.L, weight=weight, mass=mass, fraction=fraction, exact=exact)
            weight += 1
        else:
            remaining = 0.0

    half = _z(confidence) * math.sqrt(variance)
    estimate = min(max(estimate, 0.0), 1.0)
    interval = (max(0.0, estimate - half), min(1.0, estimate + half + remaining))
    return _record(geom, noise, config.metric, n_total, failures_total, estimate, interval, started,
                   method=EstimationMethod.STRATIFIED, flagged=failures_total == 0)


def compare_variants(
    L_values: Sequence[int],
    noise: NoiseConfig,
    target_failures: int = Settings.TARGET_FAILURES,
    max_samples: int = Settings.MAX_SAMPLES,
    numerator: Metric = Metric.STANDARD,
    denominator: Metric = Metric.SHORTCUT,
    workers: int = 1,
    confidence: float = 0.95,
) -> list[VariantRatio]:
    """P(numerator) / P(denominator) per L, both variants decoding the same errors."""
    results = []
    effective = noise.p if noise.model == NoiseModel.IID else expected_flip_fraction(noise.p_prime, noise.q)
    z = _z(confidence)
    for index, L in enumerate(L_values):
        with log_timing("compare_variants", logger=logger, L=L, rate=noise.rate):
            n, (f_num, f_den) = run_trials(
                L, noise, (numerator, denominator), (index,),
                done=lambda counts: min(counts) >= target_failures,
                max_samples=max_samples, workers=workers,
            )
        flagged = f_den == 0
        if f_num and f_den:
            ratio = f_num / f_den
            spread = z * math.sqrt(1.0 / f_num + 1.0 / f_den)
            lo, hi = ratio * math.exp(-spread), ratio * math.exp(spread)
        elif f_num:
            ratio = lo = (f_num / n) / zero_failure_upper(n, confidence)
            hi = math.inf
        elif f_den:
            ratio = lo = 0.0
            hi = zero_failure_upper(n, confidence) / (f_den / n)
        else:
            ratio = lo = 0.0
            hi = math.inf
        results.append(VariantRatio(
            L=L, rate=noise.rate, numerator=numerator, denominator=denominator, n=n,
            failures_numerator=f_num, failures_denominator=f_den,
            ratio=ratio, ci_lo=lo, ci_hi=hi, flagged=flagged, effective_p=effective,
        ))
        logger.info("Variant ratio", L=L, rate=noise.rate, ratio=ratio, n=n, flagged=flagged)
    return results


def find_L_star(
    noise: NoiseConfig,
    config: Optional[DecoderConfig] = None,
    L_values: Sequence[int] = range(2, 33),
    target_failures: int = Settings.TARGET_FAILURES,
    max_samples: int = Settings.MAX_SAMPLES,
    workers: int = 1,
) -> tuple[Optional[int], list[EstimateRecord]]:
    """Smallest L whose point estimate beats an unencoded qubit, P < rate."""
    config = config or DecoderConfig()
    records = []
    for L in sorted(L_values):
        record = estimate_P(build_geometry(L), noise, config, target_failures, max_samples,
                            context=(L,), workers=workers)
        records.append(record)
        if record.P < noise.rate:
            logger.info("L* found", L_star=L, rate=noise.rate, P=record.P)
            return L, records
    logger.info("No L* in range", rate=noise.rate, L_max=max(L_values))
    return None, records
