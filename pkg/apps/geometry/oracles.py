"""
Analytic coarse-grained error model of one grid cell and the brute-force
samplers used to check it.

Within a cell ABCD with center I, the centroid estimate equals I while the
NTL is inside the disk of radius r1 = L/2 around I (region 1), and equals
the corner while the NTL is inside the disk of radius r2 = R - L around that
corner (region 2). Corners are named clockwise from the top-left: A, B, C, D.
"""
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import DomainError, ModelValidityWarning
from .grid import RANGE_TOLERANCE, Point2D, has_non_collinear_triple

CORNER_OFFSETS = {
    'A': (0.0, 0.0),
    'B': (1.0, 0.0),
    'C': (1.0, 1.0),
    'D': (0.0, 1.0),
}

# Points per vectorized batch in the samplers.
SAMPLER_CHUNK = 50_000


class Region(enum.Enum):
    CENTER = 'region1'
    CORNER = 'region2'
    OTHER = 'other'


@dataclass(frozen=True)
class RegionHit:
    region: Region
    corner: str = None


@dataclass(frozen=True)
class RegionModel:
    """
    r1 - radius of the central disk, L/2
    r2 - radius of each corner disk, R - L
    cell_side - L
    range_m - R
    """
    r1: float
    r2: float
    cell_side: float
    range_m: float

    @classmethod
    def for_cell(cls, cell_side, range_m):
        if not cell_side > 0:
            raise DomainError('cell side L must be positive')
        if range_m < cell_side - RANGE_TOLERANCE:
            raise DomainError(f'range {range_m} m < L = {cell_side} m, routing precondition violated')
        limit = cell_side * math.sqrt(5) / 2
        if range_m > limit + RANGE_TOLERANCE:
            warnings.warn(
                f'range {range_m:.3f} m exceeds L*sqrt(5)/2 = {limit:.3f} m, '
                'corner disks no longer match the centroid model',
                ModelValidityWarning,
                stacklevel=3,
            )
        r1 = cell_side / 2
        r2 = max(range_m - cell_side, 0.0)
        if r2 > r1:
            raise DomainError(f'corner radius {r2:.3f} m exceeds center radius {r1:.3f} m')
        return cls(r1=r1, r2=r2, cell_side=cell_side, range_m=range_m)

    @property
    def disjoint(self):
        return self.r1 + self.r2 < self.cell_side * math.sqrt(2) / 2


def region_classify(point, model, anchor):
    """Classify ``point`` inside the cell whose top-left node is ``anchor``."""
    side = model.cell_side
    if not (anchor.x - RANGE_TOLERANCE <= point.x <= anchor.x + side + RANGE_TOLERANCE
            and anchor.y - RANGE_TOLERANCE <= point.y <= anchor.y + side + RANGE_TOLERANCE):
        raise DomainError(f'point ({point.x}, {point.y}) lies outside the cell at ({anchor.x}, {anchor.y})')
    if not model.disjoint:
        raise DomainError('center and corner disks overlap')

    center = anchor.translated(side / 2, side / 2)
    if point.distance_to(center) <= model.r1 + RANGE_TOLERANCE:
        return RegionHit(Region.CENTER)
    for name, (dx, dy) in CORNER_OFFSETS.items():
        if point.distance_to(anchor.translated(dx * side, dy * side)) <= model.r2 + RANGE_TOLERANCE:
            return RegionHit(Region.CORNER, name)
    return RegionHit(Region.OTHER)


def theoretical_mae(cell_side, range_m):
    """Mean coarse-grained error over regions 1 and 2, (2/3)(r1^3 + r2^3)/(r1^2 + r2^2)."""
    model = RegionModel.for_cell(cell_side, range_m)
    r1, r2 = model.r1, model.r2
    return 2 / 3 * (r1 ** 3 + r2 ** 3) / (r1 ** 2 + r2 ** 2)


def region_area_fraction(cell_side, range_m):
    model = RegionModel.for_cell(cell_side, range_m)
    return math.pi * (model.r1 ** 2 + model.r2 ** 2) / cell_side ** 2


def _region_errors(points, model):
    """Per-point model error and a mask of points inside region 1 or 2."""
    side = model.cell_side
    center_dist = np.hypot(points[:, 0] - side / 2, points[:, 1] - side / 2)
    corners = side * np.array(list(CORNER_OFFSETS.values()))
    corner_dist = np.hypot(
        points[:, None, 0] - corners[None, :, 0],
        points[:, None, 1] - corners[None, :, 1],
    ).min(axis=1)
    in_center = center_dist <= model.r1 + RANGE_TOLERANCE
    in_corner = ~in_center & (corner_dist <= model.r2 + RANGE_TOLERANCE)
    errors = np.where(in_center, center_dist, corner_dist)
    return errors, in_center | in_corner


def monte_carlo_analytical_mae(cell_side, range_m, samples, seed):
    """
    Mean distance to the governing region center over points drawn
    uniformly from regions 1 and 2, by rejection from the whole cell.
    """
    if samples < 100_000:
        raise DomainError('at least 10^5 samples are required')
    model = RegionModel.for_cell(cell_side, range_m)
    rng = np.random.default_rng(seed)
    kept = []
    collected = 0
    while collected < samples:
        batch = min(SAMPLER_CHUNK, math.ceil((samples - collected) * 1.3) + 16)
        points = rng.uniform(0.0, cell_side, size=(batch, 2))
        errors, inside = _region_errors(points, model)
        errors = errors[inside]
        kept.append(errors)
        collected += errors.size
    return float(np.concatenate(kept)[:samples].mean())


@dataclass(frozen=True)
class CoverageReport:
    """
    ok - every sampled point reaches three non-collinear nodes
    worst_point - failing point with the fewest nodes in range, or the
        point with the fewest nodes in range when all pass
    anchors_found - number of nodes in range at worst_point
    failures - number of failing points
    """
    ok: bool
    worst_point: Point2D
    anchors_found: int
    failures: int


def _lattice_around_cell(cell_side, range_m):
    reach = math.ceil(range_m / cell_side)
    steps = range(-reach, reach + 2)
    return np.array([(i * cell_side, j * cell_side) for j in steps for i in steps])


def verify_three_anchor_coverage(cell_side, range_m, samples, seed):
    """
    Sample one cell of an unbounded lattice and check that every point has
    at least three non-collinear lattice nodes within ``range_m``.

    The cell corners, edge midpoints and center are always checked in
    addition to the random points, since the range bound is tight exactly at
    the edge midpoints.
    """
    if samples < 1000:
        raise DomainError('at least 1000 samples are required')
    if not cell_side > 0:
        raise DomainError('cell side L must be positive')
    nodes = _lattice_around_cell(cell_side, range_m)
    rng = np.random.default_rng(seed)
    witnesses = cell_side * np.array([
        (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0),
        (0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5),
        (0.5, 0.5),
    ])
    points = np.vstack([witnesses, rng.uniform(0.0, cell_side, size=(samples, 2))])

    pattern_ok = {}
    passed = np.empty(len(points), dtype=bool)
    counts = np.empty(len(points), dtype=int)
    for start in range(0, len(points), SAMPLER_CHUNK):
        chunk = points[start:start + SAMPLER_CHUNK]
        in_range = np.hypot(
            chunk[:, None, 0] - nodes[None, :, 0],
            chunk[:, None, 1] - nodes[None, :, 1],
        ) <= range_m + RANGE_TOLERANCE
        patterns, inverse = np.unique(in_range, axis=0, return_inverse=True)
        verdicts = np.empty(len(patterns), dtype=bool)
        for index, pattern in enumerate(patterns):
            key = pattern.tobytes()
            if key not in pattern_ok:
                anchors = [Point2D(*nodes[k]) for k in np.flatnonzero(pattern)]
                pattern_ok[key] = has_non_collinear_triple(anchors, cell_side)
            verdicts[index] = pattern_ok[key]
        passed[start:start + len(chunk)] = verdicts[inverse.reshape(-1)]
        counts[start:start + len(chunk)] = in_range.sum(axis=1)

    failures = int((~passed).sum())
    candidates = np.flatnonzero(~passed) if failures else np.arange(len(points))
    worst = candidates[np.argmin(counts[candidates])]
    return CoverageReport(
        ok=failures == 0,
        worst_point=Point2D(float(points[worst, 0]), float(points[worst, 1])),
        anchors_found=int(counts[worst]),
        failures=failures,
    )
