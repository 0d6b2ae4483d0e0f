"""
Hull constructions around small components and the audit of their facts.

A small component is wrapped in the circumscribed hexagon of its points
(interior mode) or in four tangents plus the nearest side of the square
(boundary mode). Exterior angle bisectors cut one region H_i per tangent
side; the k-NN disc of the extremal point P_i restricted to H_i is A_i.
The auditor then checks the point-count facts that follow from the
component being closed under k-NN edges.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..models.census import ComponentSummary
from ..models.construction import (
    AuditReport,
    AuditStatus,
    FactResult,
    HullConstruction,
    HullMode,
    TangentLine,
    WitnessPair,
)
from ..models.geometry import (
    GEOM_TOL,
    SIDE_ORDER,
    ConvexPolygon,
    Difference,
    Disc,
    HalfPlane,
    Intersection,
    Point,
    Side,
    SquareWorld,
)
from ..models.graph import NeighborGraph
from ..models.point_set import PointSet
from .components import nearest_outside_witness
from .geometry import PointsLike, as_coords, region_area
from .knn_graph import kth_neighbor_radius

logger = logging.getLogger(__name__)

INTERIOR_NORMALS_DEG = (30.0, 90.0, 150.0, 210.0, 270.0, 330.0)
BOUNDARY_NORMALS_DEG = (0.0, 60.0, 120.0, 180.0)  # frame of the bottom side
DEFAULT_SHRINK = 1.0 - 1e-4
_PAIR_BLOCK = 4_000_000


@dataclass
class AuditSettings:
    """Knobs of a single component audit"""

    area_budget: int = 200_000  # Monte Carlo samples per region area
    area_seed: int = 0  # common stream for every area of one audit
    shrink: float = DEFAULT_SHRINK  # r0 multiplier in the bound ratio x
    witness_shrink: float = 0.0  # r = max(r0 - witness_shrink, 0)
    side_strip: Optional[float] = None  # default 2 sqrt(ln n)
    tol: float = GEOM_TOL


def _unit(angle_deg: float) -> Tuple[float, float]:
    theta = math.radians(angle_deg)
    return (math.cos(theta), math.sin(theta))


def _resolve_ids(coords: np.ndarray, ids: Optional[Sequence[int]]) -> np.ndarray:
    if ids is None:
        return np.arange(len(coords), dtype=np.int64)
    ids = np.asarray(ids, dtype=np.int64)
    if len(ids) != len(coords):
        raise ValueError("ids must label every point")
    return ids


def _tangent_line(coords: np.ndarray, ids: np.ndarray, angle_deg: float) -> TangentLine:
    normal = _unit(angle_deg)
    projection = coords @ np.asarray(normal)
    offset = float(projection.max())
    support = ids[projection >= offset - GEOM_TOL * max(1.0, abs(offset))]
    return TangentLine(
        normal=normal,
        offset=offset,
        angle_deg=angle_deg % 360.0,
        support_ids=tuple(int(i) for i in np.sort(support)),
        extremal_id=int(support.min()),
    )


def _meet(first: HalfPlane, second: HalfPlane) -> Tuple[float, float]:
    (a1, b1), c1 = first.normal, first.offset
    (a2, b2), c2 = second.normal, second.offset
    det = a1 * b2 - b1 * a2
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def _hull_polygon(vertices: List[Tuple[float, float]], scale: float) -> ConvexPolygon:
    """Polygon through consecutive line meets, coincident corners merged"""
    tol = GEOM_TOL * max(1.0, scale)
    distinct: List[Tuple[float, float]] = []
    for v in vertices:
        if not distinct or math.dist(v, distinct[-1]) > tol:
            distinct.append(v)
    while len(distinct) > 1 and math.dist(distinct[0], distinct[-1]) <= tol:
        distinct.pop()

    points = tuple(Point(x, y) for x, y in distinct)
    if len(points) == 1:
        return ConvexPolygon(points, degenerate="point")
    polygon = ConvexPolygon(points)
    if len(points) == 2 or polygon.area <= tol * max(1.0, scale):
        return ConvexPolygon(points, degenerate="segment")
    return polygon


def _assemble(
    mode: HullMode,
    lines: List[TangentLine],
    ids: np.ndarray,
    coords: np.ndarray,
    side: Optional[Side] = None,
    boundary_line: Optional[HalfPlane] = None,
) -> HullConstruction:
    halfplanes = [line.halfplane for line in lines]
    if boundary_line is not None:
        halfplanes.append(boundary_line)
    vertices = [
        _meet(halfplanes[i], halfplanes[(i + 1) % len(halfplanes)])
        for i in range(len(halfplanes))
    ]
    scale = float(np.abs(coords).max(initial=1.0))
    hull = _hull_polygon(vertices, scale)
    return HullConstruction(
        mode=mode,
        tangent_lines=lines,
        hull=hull,
        vertices=vertices,
        side=side,
        boundary_line=boundary_line,
        component_ids=tuple(int(i) for i in ids),
        degenerate=hull.degenerate is not None,
    )


def hexagon_hull(points: PointsLike, ids: Optional[Sequence[int]] = None) -> HullConstruction:
    """
    Circumscribed hexagon: six tangents with outward normals at
    30, 90, ..., 330 degrees (sides at 0 and +-60 degrees).

    Args:
        points: Component points
        ids: Vertex ids labelling `points` (default 0..m-1)

    Raises:
        ValueError: If no points are given
    """
    coords = as_coords(points)
    if len(coords) == 0:
        raise ValueError("hull of an empty point set")
    ids = _resolve_ids(coords, ids)
    lines = [_tangent_line(coords, ids, angle) for angle in INTERIOR_NORMALS_DEG]
    return _assemble(HullMode.INTERIOR, lines, ids, coords)


def boundary_hull(
    points: PointsLike,
    side: Side,
    world: SquareWorld,
    ids: Optional[Sequence[int]] = None,
) -> HullConstruction:
    """
    Four tangents at 90 and +-30 degrees to the side E, closed by E itself.

    Raises:
        ValueError: If no points are given
    """
    coords = as_coords(points)
    if len(coords) == 0:
        raise ValueError("hull of an empty point set")
    side = Side(side)
    ids = _resolve_ids(coords, ids)
    rotation = side.inward_rotation_deg
    lines = [_tangent_line(coords, ids, angle + rotation) for angle in BOUNDARY_NORMALS_DEG]
    return _assemble(
        HullMode.BOUNDARY,
        lines,
        ids,
        coords,
        side=side,
        boundary_line=world.side_halfplane(side),
    )


def bisector_regions(construction: HullConstruction) -> HullConstruction:
    """
    Attach one region H_i to every tangent side.

    H_i lies beyond side i and between the exterior angle bisectors at
    the side's two corners. The side E gets no region.
    """
    halfplanes = [line.halfplane for line in construction.tangent_lines]
    if construction.boundary_line is not None:
        halfplanes.append(construction.boundary_line)
    count = len(halfplanes)
    vertices = construction.vertices

    regions = []
    for i in range(len(construction.tangent_lines)):
        u = np.asarray(halfplanes[i].normal)
        u_prev = np.asarray(halfplanes[(i - 1) % count].normal)
        u_next = np.asarray(halfplanes[(i + 1) % count].normal)
        v_prev = np.asarray(vertices[(i - 1) % count])
        v_next = np.asarray(vertices[i])
        regions.append(
            Intersection(
                (
                    HalfPlane((-u[0], -u[1]), -halfplanes[i].offset),
                    HalfPlane(tuple(u_prev - u), float((u_prev - u) @ v_prev)),
                    HalfPlane(tuple(u_next - u), float((u_next - u) @ v_next)),
                )
            )
        )
    construction.bisector_regions = regions
    return construction


@dataclass
class _AuditContext:
    points: PointSet
    graph: NeighborGraph
    ids: np.ndarray
    construction: HullConstruction
    discs: List[Disc]
    a_areas: List[float]
    a_errors: List[float]
    a0_area: float
    a0_error: float
    settings: AuditSettings


def _distances(points: PointSet, centre: Point) -> np.ndarray:
    return np.hypot(points.xs - centre.x, points.ys - centre.y)


class ConstructionAuditor:
    """Builds the construction around a component and checks its facts"""

    def __init__(self, settings: Optional[AuditSettings] = None):
        self.settings = settings or AuditSettings()
        self.fact_checks: List[Tuple[str, Callable[[_AuditContext], FactResult]]] = [
            ("hull", self._check_hull),
            ("a", self._check_empty_regions),
            ("b", self._check_a0_population),
            ("c", self._check_witness_lune),
            ("d", self._check_a0_lune_disjoint),
            ("e", self._check_witness_gap),
            ("area_order", self._check_area_order),
        ]

    def audit(
        self,
        points: PointSet,
        graph: NeighborGraph,
        component: ComponentSummary,
        mode: HullMode,
    ) -> AuditReport:
        """
        Audit one non-giant component.

        Raises:
            ValueError: If the component is the giant or holds every vertex
        """
        mode = HullMode(mode)
        if component.is_giant:
            raise ValueError(f"giant component {component.comp_id} cannot be audited")
        if component.size >= graph.vertex_count:
            raise ValueError("no outside vertex")

        settings = self.settings
        world = points.world
        ids = component.vertices
        coords = points.points[ids]

        side = None
        if mode is HullMode.BOUNDARY:
            per_side = world.side_distances(coords[:, 0], coords[:, 1]).min(axis=0)
            strip = settings.side_strip
            if strip is None:
                strip = 2.0 * math.sqrt(max(world.log_n, 0.0))
            if np.count_nonzero(per_side < strip) >= 2:
                logger.debug(f"Component {component.comp_id} is near two sides, skipped")
                return AuditReport(
                    component_id=component.comp_id,
                    mode=mode,
                    status=AuditStatus.SKIPPED,
                    skip_reason="ambiguous side",
                )
            side = SIDE_ORDER[int(np.argmin(per_side))]
            construction = boundary_hull(coords, side, world, ids=ids)
        else:
            construction = hexagon_hull(coords, ids=ids)
        bisector_regions(construction)

        discs = []
        for line in construction.tangent_lines:
            radius = kth_neighbor_radius(graph, points, line.extremal_id)
            discs.append(Disc(points.point(line.extremal_id), radius))
        construction.knn_disc_radii = [d.radius for d in discs]
        construction.a_regions = [
            Intersection((disc, region))
            for disc, region in zip(discs, construction.bisector_regions)
        ]

        a_estimates = [self._area(region) for region in construction.a_regions]
        hull_estimates = [self._area(Intersection((disc, construction.hull))) for disc in discs]
        smallest = min(e.area for e in hull_estimates)
        a0_index = next(
            i
            for i, e in enumerate(hull_estimates)
            if e.area <= smallest + 1e-9 * max(smallest, 1e-300)
        )
        construction.a0_index = a0_index
        construction.a0 = Intersection((discs[a0_index], construction.hull))

        witness = nearest_outside_witness(graph, points, component)
        construction.witness = WitnessPair(
            p=witness.p,
            q=witness.q,
            r0=witness.r0,
            r=max(witness.r0 - settings.witness_shrink, 0.0),
        )
        lune = Difference(
            Disc(points.point(witness.q), witness.r0),
            Disc(points.point(witness.p), witness.r0),
        )
        if mode is HullMode.BOUNDARY:
            construction.b_region = Intersection((lune, world.polygon()))
        else:
            construction.b_region = lune
        b_area = self._area(construction.b_region).area

        a0 = hull_estimates[a0_index]
        x = float("nan")
        if a0.area > 0:
            x = construction.witness.r * settings.shrink / math.sqrt(a0.area / math.pi)

        report = AuditReport(
            component_id=component.comp_id,
            mode=mode,
            side=side,
            a0_area=a0.area,
            b_area=b_area,
            a_areas=[e.area for e in a_estimates],
            x=x,
            construction=construction,
        )
        context = _AuditContext(
            points=points,
            graph=graph,
            ids=ids,
            construction=construction,
            discs=discs,
            a_areas=report.a_areas,
            a_errors=[e.std_error for e in a_estimates],
            a0_area=a0.area,
            a0_error=a0.std_error,
            settings=settings,
        )

        for name, check in self.fact_checks:
            try:
                report.facts.append(check(context))
            except Exception as e:
                report.facts.append(
                    FactResult(
                        fact=name,
                        passed=False,
                        severity="critical",
                        message=f"Fact check failed with error: {e}",
                    )
                )

        if not report.passed:
            logger.warning(
                f"Component {component.comp_id} ({mode.value}) failed facts {report.failed_facts}"
            )
        return report

    def _area(self, region):
        return region_area(region, self.settings.area_budget, seed=self.settings.area_seed)

    def _check_hull(self, ctx: _AuditContext) -> FactResult:
        """Every component point lies in H and every tangent touches one"""
        coords = ctx.points.points[ctx.ids]
        inside = ctx.construction.hull.contains(coords[:, 0], coords[:, 1], tol=ctx.settings.tol)
        outside = [int(i) for i in ctx.ids[~inside]]
        unsupported = [
            line.angle_deg for line in ctx.construction.tangent_lines if not line.support_ids
        ]
        passed = not outside and not unsupported
        return FactResult(
            fact="hull",
            passed=passed,
            severity="critical",
            message="Hull contains the component" if passed else "Hull misses component points",
            witnesses=outside,
            details={"unsupported_angles": unsupported},
        )

    def _check_empty_regions(self, ctx: _AuditContext) -> FactResult:
        """(a) No point strictly inside D_i and strictly beyond side i within H_i"""
        tol = ctx.settings.tol
        points = ctx.points
        offenders = []
        for line, disc, region in zip(
            ctx.construction.tangent_lines, ctx.discs, ctx.construction.bisector_regions
        ):
            near = np.flatnonzero(
                (np.abs(points.xs - disc.center.x) < disc.radius)
                & (np.abs(points.ys - disc.center.y) < disc.radius)
            )
            xs, ys = points.xs[near], points.ys[near]
            strictly_inside = np.hypot(xs - disc.center.x, ys - disc.center.y) < disc.radius - tol
            beyond = line.halfplane.signed_distance(xs, ys) > tol
            hits = near[strictly_inside & beyond & region.contains(xs, ys)]
            offenders.extend(int(i) for i in hits)
        offenders = sorted(set(offenders))
        return FactResult(
            fact="a",
            passed=not offenders,
            severity="critical",
            message="Regions A_i are empty" if not offenders else f"{len(offenders)} points in A_i",
            witnesses=offenders,
        )

    def _a0_members(self, ctx: _AuditContext) -> np.ndarray:
        disc = ctx.discs[ctx.construction.a0_index]
        tol = ctx.settings.tol
        within = _distances(ctx.points, disc.center) <= disc.radius + tol
        candidates = np.flatnonzero(within)
        inside = ctx.construction.hull.contains(
            ctx.points.xs[candidates], ctx.points.ys[candidates], tol=tol
        )
        return candidates[inside]

    def _check_a0_population(self, ctx: _AuditContext) -> FactResult:
        """(b) A_0 holds at least k+1 points, all from the component"""
        members = self._a0_members(ctx)
        foreign = [int(i) for i in members[~np.isin(members, ctx.ids)]]
        needed = ctx.graph.k + 1
        passed = len(members) >= needed and not foreign
        return FactResult(
            fact="b",
            passed=passed,
            severity="critical",
            message=f"A_0 holds {len(members)} points (need {needed})",
            witnesses=foreign,
            details={"count": len(members)},
        )

    def _lune_masks(self, ctx: _AuditContext) -> Tuple[np.ndarray, np.ndarray, float]:
        witness = ctx.construction.witness
        d_q = _distances(ctx.points, ctx.points.point(witness.q))
        d_p = _distances(ctx.points, ctx.points.point(witness.p))
        return d_q, d_p, witness.r0

    def _check_witness_lune(self, ctx: _AuditContext) -> FactResult:
        """(c) out(Q) lies in B, so B holds at least k points besides Q"""
        tol = ctx.settings.tol
        witness = ctx.construction.witness
        d_q, d_p, r0 = self._lune_masks(ctx)
        in_b = (d_q <= r0 + tol) & (d_p >= r0 - tol)
        in_b[witness.q] = False
        out_q = ctx.graph.out(witness.q)
        stray = [int(v) for v in out_q if not in_b[v]]
        count = int(np.count_nonzero(in_b))
        passed = not stray and count >= ctx.graph.k
        return FactResult(
            fact="c",
            passed=passed,
            severity="critical",
            message=f"B holds {count} points besides Q",
            witnesses=stray,
            details={"count": count},
        )

    def _check_a0_lune_disjoint(self, ctx: _AuditContext) -> FactResult:
        """(d) No point of A_0 lies in the interior of B"""
        tol = ctx.settings.tol
        d_q, d_p, r0 = self._lune_masks(ctx)
        members = self._a0_members(ctx)
        shared = members[(d_q[members] < r0 - tol) & (d_p[members] > r0 + tol)]
        return FactResult(
            fact="d",
            passed=len(shared) == 0,
            severity="critical",
            message="A_0 and B share no point" if len(shared) == 0 else "A_0 meets B",
            witnesses=[int(i) for i in shared],
        )

    def _check_witness_gap(self, ctx: _AuditContext) -> FactResult:
        """(e) Every outside point is farther than r0 from the component"""
        r0 = ctx.construction.witness.r0
        inside = np.zeros(ctx.points.count, dtype=bool)
        inside[ctx.ids] = True
        outside = np.flatnonzero(~inside)
        comp = ctx.points.points[ctx.ids]
        close = []
        step = max(1, _PAIR_BLOCK // len(comp))
        for start in range(0, len(outside), step):
            block = outside[start : start + step]
            nearest = cdist(ctx.points.points[block], comp).min(axis=1)
            close.extend(int(i) for i in block[nearest <= r0 - 1e-9])
        return FactResult(
            fact="e",
            passed=not close,
            severity="critical",
            message=f"Outside points keep distance r0={r0:.6f}" if not close else "Outside point closer than r0",
            witnesses=close,
        )

    def _check_area_order(self, ctx: _AuditContext) -> FactResult:
        """
        Sum bound |A_1| + ... + |A_m| >= m |A_0| (m = 6 interior, 4 boundary)
        and, for interior audits whose discs stay inside the world, |A_i| >= |A_0|
        for every i. Monte Carlo slack is 4 standard errors.
        """
        construction = ctx.construction
        world = ctx.points.world
        count = len(ctx.a_areas)
        sum_slack = 4.0 * (sum(ctx.a_errors) + count * ctx.a0_error)
        sum_ok = sum(ctx.a_areas) >= count * ctx.a0_area - sum_slack

        short: List[int] = []
        discs_inside = all(
            d.radius <= float(world.boundary_distance(d.center.x, d.center.y)) for d in ctx.discs
        )
        if construction.mode is HullMode.INTERIOR and discs_inside:
            short = [
                i
                for i, (area, err) in enumerate(zip(ctx.a_areas, ctx.a_errors))
                if area < ctx.a0_area - 4.0 * (err + ctx.a0_error)
            ]

        if not sum_ok:
            message = f"Sum of |A_i| below {count} |A_0|"
        elif short:
            message = f"Regions {short} smaller than A_0"
        else:
            message = f"Sum of |A_i| >= {count} |A_0|"
        return FactResult(
            fact="area_order",
            passed=sum_ok and not short,
            severity="warning",
            message=message,
            details={
                "sum_a": sum(ctx.a_areas),
                "a0": ctx.a0_area,
                "multiple": count,
                "per_region_checked": construction.mode is HullMode.INTERIOR and discs_inside,
            },
        )


def audit_component(
    points: PointSet,
    graph: NeighborGraph,
    component: ComponentSummary,
    mode: HullMode,
    settings: Optional[AuditSettings] = None,
) -> AuditReport:
    """Build the construction around `component` and check facts (a)-(e)"""
    return ConstructionAuditor(settings).audit(points, graph, component, mode)
