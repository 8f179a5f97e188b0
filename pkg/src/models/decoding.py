"""Decoder configuration and decode results."""

from enum import Enum
from typing import Literal, Union

from pydantic import BaseModel, Field


class Metric(str, Enum):
    """Distance metric used by the decoder."""
    STANDARD = "STANDARD"
    SHORTCUT = "SHORTCUT"


class DecoderConfig(BaseModel):
    """Decoder variant selection."""
    metric: Metric = Field(Metric.STANDARD, description="STANDARD or SHORTCUT distance metric")
    count_operations: bool = Field(True, description="Track the examined-pair counter")

    model_config = {"frozen": True}


NodeLabel = Union[tuple[int, int], Literal["LEFT", "RIGHT"]]


class Pairing(BaseModel):
    """One annihilation: two nodes joined at search distance k."""
    a: NodeLabel
    b: NodeLabel
    k: int = Field(..., ge=1)


class DecodeResult(BaseModel):
    """Outcome of a single decoder run."""
    correction: list[int] = Field(default_factory=list, description="Sorted qubit ids of the correction")
    pairings: list[Pairing] = Field(default_factory=list, description="Annihilations in order")
    k_max: int = Field(0, ge=0, description="Search distance of the last annihilation")
    examined: int = Field(0, ge=0, description="Candidate pairs examined")
    passes: int = Field(0, ge=0, description="Scan passes over the live anyons")
    edge_counts: dict[str, int] = Field(
        default_factory=lambda: {"LEFT": 0, "RIGHT": 0},
        description="Number of pairings with each boundary",
    )
