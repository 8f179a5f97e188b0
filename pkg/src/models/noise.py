"""Noise model configuration and adversarial construction records."""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class NoiseModel(str, Enum):
    """Supported bit-flip noise models."""
    IID = "IID"
    CORRELATED = "CORRELATED"


class NoiseConfig(BaseModel):
    """Noise parameters plus the master seed every random stream derives from."""
    model: NoiseModel = Field(NoiseModel.IID, description="IID or CORRELATED")
    p: float = Field(0.0, ge=0.0, le=1.0, description="Flip probability per qubit (IID)")
    p_prime: float = Field(0.0, ge=0.0, le=1.0, description="Primary flip probability (CORRELATED)")
    q: float = Field(0.0, ge=0.0, le=1.0, description="Neighbour flip probability per primary flip (CORRELATED)")
    seed: int = Field(0, ge=0, lt=2**64, description="64-bit master seed")

    model_config = {"frozen": True}

    @property
    def rate(self) -> float:
        """The physical rate the model is parameterized by (p or p')."""
        return self.p if self.model == NoiseModel.IID else self.p_prime

    @model_validator(mode="after")
    def _check_unused_fields(self) -> "NoiseConfig":
        if self.model == NoiseModel.IID and (self.p_prime or self.q):
            raise ValueError("p_prime and q apply to the CORRELATED model only")
        if self.model == NoiseModel.CORRELATED and self.p:
            raise ValueError("p applies to the IID model only; use p_prime")
        return self


class CantorSpec(BaseModel):
    """Description of a level-n failing cluster placed along one row."""
    level: int = Field(..., ge=0, description="Recursion level n")
    row: int = Field(..., ge=0, description="Row holding every error")
    width: int = Field(..., description="Anyon extent w_n = (3^n + 1) / 2")
    error_count: int = Field(..., description="Number of errors, 2^n")
    start_col: int = Field(..., ge=0, description="Column j of the left-most error")
    columns: list[int] = Field(..., description="Columns c of the H(row, c) errors")
