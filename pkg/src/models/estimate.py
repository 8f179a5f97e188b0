"""Monte Carlo run specifications, estimate records and fit results."""

from datetime import datetime, timezone
from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from src.models.decoding import Metric
from src.models.noise import NoiseConfig, NoiseModel
from src.utils.settings import Settings

SCHEMA_VERSION = 1

CSV_COLUMNS = ("L", "p", "p_prime", "q", "variant", "n", "failures", "P", "ci_lo", "ci_hi", "seed")


def point_key(
    L: int,
    model: NoiseModel,
    p: float,
    p_prime: float,
    q: float,
    variant: Metric,
    method: "EstimationMethod",
    seed: int,
) -> str:
    return "|".join(str(x) for x in (L, model.value, p, p_prime, q, variant.value, method.value, seed))


class EstimationMethod(str, Enum):
    """How a logical error rate was estimated."""
    DIRECT = "DIRECT"
    STRATIFIED = "STRATIFIED"


class RunSpec(BaseModel):
    """Grid of (L, rate) points to estimate; mirrors the sweep config file."""
    L_values: list[int] = Field(..., min_length=1, description="Lattice sizes")
    p_values: list[float] = Field(..., min_length=1, description="p (IID) or p' (CORRELATED) values")
    q: float = Field(0.0, ge=0.0, le=1.0, description="Neighbour probability (CORRELATED)")
    model: NoiseModel = NoiseModel.IID
    variant: Metric = Metric.STANDARD
    target_failures: int = Field(Settings.TARGET_FAILURES, ge=1, description="Stop after this many failures")
    max_samples: int = Field(Settings.MAX_SAMPLES, ge=1, description="Sample cap per point")
    seed: int = Field(Settings.DEFAULT_SEED, ge=0, lt=2**64, description="Master seed")
    workers: int = Field(Settings.WORKERS, ge=1, description="Parallelism hint")
    method: EstimationMethod = EstimationMethod.DIRECT
    stratified_budget: int = Field(Settings.STRATIFIED_BUDGET, ge=1)
    stratified_tail: float = Field(Settings.STRATIFIED_TAIL, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_grid(self) -> "RunSpec":
        if any(L < 2 for L in self.L_values):
            raise ValueError("every L must be >= 2")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("every rate must lie in [0, 1]")
        if self.method == EstimationMethod.STRATIFIED and self.model != NoiseModel.IID:
            raise ValueError("stratified estimation supports the IID model only")
        return self

    def noise_at(self, rate: float) -> NoiseConfig:
        if self.model == NoiseModel.IID:
            return NoiseConfig(model=self.model, p=rate, seed=self.seed)
        return NoiseConfig(model=self.model, p_prime=rate, q=self.q, seed=self.seed)


class EstimateRecord(BaseModel):
    """One Monte Carlo measurement point."""
    schema_version: Literal[1] = SCHEMA_VERSION
    L: int = Field(..., ge=2)
    model: NoiseModel
    p: float = 0.0
    p_prime: float = 0.0
    q: float = 0.0
    variant: Metric
    method: EstimationMethod = EstimationMethod.DIRECT
    n: int = Field(..., ge=0, description="Samples drawn")
    failures: int = Field(..., ge=0, description="Logical failures observed")
    P: float = Field(..., ge=0.0, le=1.0, description="Logical error rate estimate")
    ci_lo: float = Field(..., ge=0.0, le=1.0)
    ci_hi: float = Field(..., ge=0.0, le=1.0)
    flagged: bool = Field(False, description="Sample cap reached without any failure")
    seed: int
    wall_time_s: float = 0.0
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    @model_validator(mode="after")
    def _check_interval(self) -> "EstimateRecord":
        if not self.ci_lo <= self.P <= self.ci_hi:
            raise ValueError("confidence interval must contain P")
        return self

    @property
    def rate(self) -> float:
        return self.p if self.model == NoiseModel.IID else self.p_prime

    @property
    def key(self) -> str:
        """Identity of the measured point, used to resume sweeps."""
        return point_key(self.L, self.model, self.p, self.p_prime, self.q, self.variant, self.method, self.seed)

    def csv_row(self) -> dict:
        row = self.model_dump(mode="json", include=set(CSV_COLUMNS))
        return {column: row[column] for column in CSV_COLUMNS}


class FitResult(BaseModel):
    """Sub-threshold scaling fit."""
    kind: Literal["beta", "alpha"]
    rate: float = Field(..., description="Physical rate the records share")
    L_values: list[int]
    beta: float
    alpha: Optional[float] = None
    intercept: float
    r_squared: float = Field(..., ge=0.0, le=1.0)
    c: Optional[float] = Field(None, description="Length scale constant used for alpha fits")
    alpha_ci: Optional[tuple[float, float]] = Field(None, description="Bootstrap 95% interval of alpha")


class CrossingEstimate(BaseModel):
    """Threshold estimate from pairwise crossings of log P curves."""
    crossings: list[tuple[int, int, float]] = Field(..., description="(L_small, L_large, crossing rate)")
    median: float
    spread: tuple[float, float]


class VariantRatio(BaseModel):
    """Paired comparison of two decoder variants at one L."""
    L: int
    rate: float
    numerator: Metric
    denominator: Metric
    n: int
    failures_numerator: int
    failures_denominator: int
    ratio: float
    ci_lo: float
    ci_hi: float
    flagged: bool = Field(False, description="No denominator failures; ratio is a lower bound")
    effective_p: float = Field(..., description="Effective flip rate, (1 + q) p' for correlated noise")
