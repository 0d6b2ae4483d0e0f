from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from .geometry import ConvexPolygon, HalfPlane, Region, Side


class HullMode(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


class AuditStatus(str, Enum):
    AUDITED = "audited"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class TangentLine:
    """Supporting line {p : normal . p = offset} of a component's points"""

    normal: Tuple[float, float]  # outward unit normal
    offset: float
    angle_deg: float  # direction of the outward normal
    support_ids: Tuple[int, ...]  # points on the line (within tolerance)
    extremal_id: int  # P_i: lowest supporting id

    @property
    def halfplane(self) -> HalfPlane:
        return HalfPlane(self.normal, self.offset)


@dataclass(frozen=True)
class WitnessPair:
    p: int
    q: int
    r0: float
    r: float  # r0 reduced by the configured witness shrink


@dataclass
class HullConstruction:
    """Circumscribed hull of a component with the regions built around it"""

    mode: HullMode
    tangent_lines: List[TangentLine]
    hull: ConvexPolygon
    vertices: List[Tuple[float, float]]  # v_i = line i meets line i+1
    side: Optional[Side] = None  # E, boundary mode only
    boundary_line: Optional[HalfPlane] = None
    component_ids: Tuple[int, ...] = ()
    degenerate: bool = False
    bisector_regions: List[Region] = field(default_factory=list)
    knn_disc_radii: List[float] = field(default_factory=list)
    a_regions: List[Region] = field(default_factory=list)
    a0_index: Optional[int] = None
    a0: Optional[Region] = None
    witness: Optional[WitnessPair] = None
    b_region: Optional[Region] = None

    @property
    def extremal_points(self) -> List[int]:
        return [line.extremal_id for line in self.tangent_lines]


@dataclass
class FactResult:
    """Outcome of one deduced fact; failures carry offending point ids"""

    fact: str
    passed: bool
    severity: str  # 'critical', 'warning'
    message: str
    witnesses: List[int] = field(default_factory=list)
    details: Optional[Dict[str, Any]] = None


@dataclass
class AuditReport:
    component_id: int
    mode: HullMode
    status: AuditStatus = AuditStatus.AUDITED
    side: Optional[Side] = None
    skip_reason: Optional[str] = None
    facts: List[FactResult] = field(default_factory=list)
    a0_area: float = float("nan")
    b_area: float = float("nan")
    a_areas: List[float] = field(default_factory=list)
    x: float = float("nan")
    construction: Optional[HullConstruction] = None

    def fact(self, name: str) -> Optional[FactResult]:
        return next((f for f in self.facts if f.fact == name), None)

    @property
    def passed(self) -> bool:
        """All critical facts hold (skipped audits never pass)"""
        if self.status is not AuditStatus.AUDITED:
            return False
        return all(f.passed for f in self.facts if f.severity == "critical")

    @property
    def failed_facts(self) -> List[str]:
        return [f.fact for f in self.facts if not f.passed]
