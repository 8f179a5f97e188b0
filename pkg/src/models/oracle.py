"""Exhaustive-enumeration reports."""

from typing import Optional

from pydantic import BaseModel, Field

from src.models.decoding import Metric


class OracleReport(BaseModel):
    """Exact small-lattice reference values for one decoder variant."""
    schema_version: int = 1
    L: int = Field(..., ge=2)
    variant: Metric
    p_values: list[float] = Field(default_factory=list)
    failure_rates: list[float] = Field(default_factory=list, description="Exact P at each p")
    min_failing_weight: Optional[int] = Field(None, description="Decoder minimum failing weight")
    witness: Optional[list[int]] = Field(None, description="Qubit ids of a minimum-weight failing pattern")
    ml_min_weight: Optional[int] = Field(None, description="Optimal-decoder minimum failing weight")
    failing_counts: Optional[list[int]] = Field(None, description="Failing patterns per weight")
    pattern_counts: Optional[list[int]] = Field(None, description="All patterns per weight, C(Q, w)")
