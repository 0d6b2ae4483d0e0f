from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional


class CurveFamily(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class BoundQuery:
    """Areas |A|, |B|, |C| and the count k of a two-set concentration query"""

    a: float
    b: float
    c: float
    k: int

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError(f"areas must be >= 0, got ({self.a}, {self.b}, {self.c})")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class CurveValue:
    """A bound curve evaluated at one x; invalid outside its domain"""

    value: float
    valid: bool


@dataclass
class BoundResult:
    family: CurveFamily
    x_star: float
    alpha: float  # per-configuration base: bound = alpha^(-k)
    value: float  # applicable minimum at x_star for k = 1
    analytic_x_star: float
    crossing_residual: float  # crossing identity evaluated at x_star
    curves: Dict[str, CurveValue] = field(default_factory=dict)


@dataclass(frozen=True)
class ThresholdRow:
    name: str
    derived: Optional[float]  # None for reported-only rows
    reported: Optional[float]
    source: str  # "derived" or "reported"
    note: str = ""


@dataclass
class CurveTable:
    """Curves of one family tabulated over x for plotting elsewhere"""

    family: CurveFamily
    k: int
    xs: List[float] = field(default_factory=list)
    values: Dict[str, List[float]] = field(default_factory=dict)
    valid: Dict[str, List[bool]] = field(default_factory=dict)
    applicable_min: List[float] = field(default_factory=list)
