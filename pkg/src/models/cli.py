"""Validated command-line configuration."""

from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.decoding import Metric
from src.models.estimate import EstimationMethod
from src.models.noise import NoiseConfig, NoiseModel
from src.utils.settings import Settings


class Command(str, Enum):
    DECODE = "decode"
    SAMPLE = "sample"
    SWEEP = "sweep"
    LSTAR = "lstar"
    FIT = "fit"
    THRESHOLD = "threshold"
    ADVERSARIAL = "adversarial"
    ORACLE = "oracle"
    COMPARE = "compare"


SINGLE_SIZE = {Command.DECODE, Command.SAMPLE, Command.ADVERSARIAL, Command.ORACLE}
NEEDS_RATE = {Command.SAMPLE, Command.LSTAR, Command.COMPARE}
NEEDS_INPUT = {Command.FIT, Command.THRESHOLD}


class CliConfig(BaseModel):
    """Every flag of every subcommand; ranges are checked before anything runs."""
    command: Command
    fit_kind: Optional[Literal["beta", "alpha"]] = None

    L_values: list[int] = Field(default_factory=list, description="--L, single value, list or range")
    p_values: list[float] = Field(default_factory=list, description="--p")
    p_prime_values: list[float] = Field(default_factory=list, description="--p-prime")
    q: float = Field(0.0, ge=0.0, le=1.0)
    variant: Metric = Metric.STANDARD
    numerator: Metric = Metric.STANDARD
    denominator: Metric = Metric.SHORTCUT
    method: EstimationMethod = EstimationMethod.DIRECT
    seed: int = Field(Settings.DEFAULT_SEED, ge=0, lt=2**64)
    target_failures: int = Field(Settings.TARGET_FAILURES, ge=1)
    max_samples: int = Field(Settings.MAX_SAMPLES, ge=1)
    threads: int = Field(Settings.WORKERS, ge=1)
    out: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    log_level: Optional[str] = None

    pattern: str = Field("sampled", pattern=r"^(sampled|cantor:\d+|ids:\d*(,\d+)*)$")
    level: int = Field(2, ge=0)
    row: Optional[int] = Field(None, ge=0)
    start_col: Optional[int] = Field(None, ge=0)
    w_max: Optional[int] = Field(None, ge=1)
    config_path: Optional[Path] = None
    in_path: Optional[Path] = None
    beta: Optional[float] = Field(None, gt=0.0)
    c: float = Field(0.25, gt=0.0)
    bootstrap: int = Field(0, ge=0)

    @field_validator("L_values")
    @classmethod
    def _check_sizes(cls, v: list[int]) -> list[int]:
        if any(L < 2 for L in v):
            raise ValueError("every L must be >= 2")
        return v

    @field_validator("p_values", "p_prime_values")
    @classmethod
    def _check_rates(cls, v: list[float]) -> list[float]:
        if any(not 0.0 <= p <= 1.0 for p in v):
            raise ValueError("rates must lie in [0, 1]")
        return v

    @model_validator(mode="after")
    def _check_command(self) -> "CliConfig":
        if self.p_values and self.p_prime_values:
            raise ValueError("--p and --p-prime are mutually exclusive")
        if self.q and not self.p_prime_values:
            raise ValueError("--q requires --p-prime")
        if self.command in SINGLE_SIZE and len(self.L_values) != 1:
            raise ValueError(f"{self.command.value} needs exactly one --L")
        if self.command == Command.COMPARE and not self.L_values:
            raise ValueError("compare needs --L")
        if self.command in NEEDS_RATE and not self.rates:
            raise ValueError(f"{self.command.value} needs --p or --p-prime")
        if self.command == Command.SAMPLE and len(self.rates) != 1:
            raise ValueError("sample takes a single rate")
        if self.command == Command.COMPARE and len(self.rates) != 1:
            raise ValueError("compare takes a single rate")
        if self.command in NEEDS_INPUT and self.in_path is None:
            raise ValueError(f"{self.command.value} needs --in")
        if self.command == Command.SWEEP and self.config_path is None:
            raise ValueError("sweep needs --config")
        if self.command == Command.FIT and self.fit_kind is None:
            raise ValueError("fit needs beta or alpha")
        return self

    @property
    def L(self) -> int:
        return self.L_values[0]

    @property
    def model(self) -> NoiseModel:
        return NoiseModel.CORRELATED if self.p_prime_values else NoiseModel.IID

    @property
    def rates(self) -> list[float]:
        return self.p_prime_values or self.p_values

    def noise(self, rate: Optional[float] = None) -> NoiseConfig:
        """Noise config at `rate`, or at the single configured rate (0 when none)."""
        if rate is None:
            rate = self.rates[0] if self.rates else 0.0
        if self.model == NoiseModel.IID:
            return NoiseConfig(model=NoiseModel.IID, p=rate, seed=self.seed)
        return NoiseConfig(model=NoiseModel.CORRELATED, p_prime=rate, q=self.q, seed=self.seed)
