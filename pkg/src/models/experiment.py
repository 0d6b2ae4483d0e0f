import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.config import default_threads

MAX_SEED = (1 << 64) - 1


class ExperimentConfig(BaseModel):
    """Every knob of one experiment run"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    area_n: float = Field(gt=1.0)
    k: Optional[int] = Field(default=None, ge=1)
    c: Optional[float] = Field(default=None, gt=0.0)
    trials: int = Field(default=100, ge=1)
    master_seed: int = Field(default=0, ge=0, le=MAX_SEED)
    boundary_strip: Optional[float] = Field(default=None, ge=0.0)
    small_coeff: float = Field(default=1.0, gt=0.0)
    threads: int = Field(default_factory=default_threads, ge=1)
    side_multiple: float = Field(default=1.0, gt=0.0)
    directed_cap_factor: int = Field(default=4, ge=1)
    area_budget: int = Field(default=200_000, ge=10_000)
    shrink: float = Field(default=1.0 - 1e-4, gt=0.0, le=1.0)
    lemma_trials: int = Field(default=10_000, ge=1)
    out: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    show_progress: bool = False

    @model_validator(mode="after")
    def _exactly_one_degree(self) -> "ExperimentConfig":
        if (self.k is None) == (self.c is None):
            raise ValueError("set exactly one of k or c")
        return self

    @property
    def log_n(self) -> float:
        return math.log(self.area_n)

    @property
    def resolved_k(self) -> int:
        """k itself, or ceil(c ln area_n)"""
        if self.k is not None:
            return self.k
        return max(1, math.ceil(self.c * self.log_n))

    @property
    def strip(self) -> float:
        return self.log_n if self.boundary_strip is None else self.boundary_strip

    @property
    def side_threshold(self) -> float:
        """Distance to a side under which a component counts as near it"""
        return 2.0 * self.small_coeff * math.sqrt(self.log_n) * self.side_multiple

    def with_c(self, c: float) -> "ExperimentConfig":
        return self.model_copy(update={"c": c, "k": None})

    def metadata(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"out", "show_progress", "threads"})


@dataclass
class TrialRecord:
    """Outcome of one sample-build-census trial (status 'error' when m <= k)"""

    trial: int
    seed: int
    k: int
    point_count: int
    status: str
    connected: bool = False
    component_count: int = 0
    giant_fraction: float = 0.0
    small_count: int = 0
    boundary_small_count: int = 0
    interior_small_count: int = 0
    corner_small_count: int = 0
    max_small_diameter: float = 0.0
    max_edge_length: float = 0.0
    mean_size_excess: float = float("nan")
    foreign_points: int = 0
    closed_set_count: int = 0  # sink sets of the directed relation
    min_small_pair_distance: float = float("nan")
    c: float = float("nan")
    error: str = ""


@dataclass
class SweepRow:
    area_n: float
    c: float
    k: int
    trials: int
    connected_count: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    mean_giant_fraction: float
    max_small_diameter_normalized: float
    boundary_small_trials: int
    interior_small_trials: int


@dataclass
class BoundaryCensusRow:
    area_n: float
    k: int
    trials: int
    error_trials: int
    boundary_strip: float
    boundary_small_total: int
    interior_small_total: int
    corner_small_total: int
    boundary_small_trials: int
    interior_small_trials: int
    boundary_frequency: float
    interior_frequency: float
    mean_size_excess: float
    foreign_points_total: int
    max_edge_length_normalized: float


AUDIT_COLUMNS = (
    "trial", "comp_id", "mode", "k",
    "fact_a", "fact_b", "fact_c", "fact_d", "fact_e",
    "A0_area", "B_area", "x",
)


@dataclass
class AuditRow:
    trial: int
    comp_id: int
    mode: str  # "interior", "boundary" or "skipped"
    k: int
    fact_a: Optional[bool]
    fact_b: Optional[bool]
    fact_c: Optional[bool]
    fact_d: Optional[bool]
    fact_e: Optional[bool]
    a0_area: float
    b_area: float
    x: float

    def as_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record["A0_area"] = record.pop("a0_area")
        record["B_area"] = record.pop("b_area")
        return {column: record[column] for column in AUDIT_COLUMNS}


@dataclass
class LemmaAuditRow:
    case: int
    a: float
    b: float
    c: float
    k: int
    exact: float
    bound: float
    mc_freq: float
    mc_se: float
    status: str  # "ok", "violation" or "rejected"
    reason: str = ""
