"""
Pre-deployment planning: NTL range, centroid timing and the fineCntLimit bound.
"""
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from apps.core.exceptions import DomainError, ModelValidityWarning, PlanningError
from .grid import GridConfig, connectivity_graph, grid_positions
from .oracles import region_area_fraction, theoretical_mae

logger = logging.getLogger(__name__)

# Largest denominator accepted when reading a granularity as a fraction p/P.
MAX_GRANULARITY_DENOMINATOR = 1000


def min_ntl_range(cell_side):
    """Smallest NTL range that always reaches three non-collinear grid nodes."""
    if not cell_side > 0:
        raise DomainError('cell side L must be positive')
    return cell_side * math.sqrt(5) / 2


def rounded_ntl_range(cell_side):
    return math.ceil(min_ntl_range(cell_side) - 1e-9)


@dataclass(frozen=True)
class TimingPlan:
    """
    Beacon and centroid timing of a deployment.

    centroid_interval - P, seconds between centroid computations
    beacon_interval - p, seconds between two beacons of one node
    granularity - G = p/P
    max_beacons - beacons a node emits per centroid window
    threshold - T, fraction of max_beacons a node must reach to be a candidate
    speed - S, NTL speed in m/s used for the derivation
    raw_interval - P before rounding to the beacon lattice
    """
    centroid_interval: float
    beacon_interval: float
    granularity: float
    max_beacons: int
    threshold: float
    speed: float
    raw_interval: float = None

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise DomainError('threshold T must lie in (0, 1]')
        if not (self.beacon_interval > 0 and self.centroid_interval > 0):
            raise DomainError('beacon and centroid intervals must be positive')
        if abs(self.max_beacons * self.beacon_interval - self.centroid_interval) > 1e-9:
            raise DomainError('max_beacons * p must equal P')

    @property
    def candidate_threshold_count(self):
        return math.ceil(self.threshold * self.max_beacons - 1e-9)

    @classmethod
    def from_intervals(cls, centroid_interval, beacon_interval, threshold, speed=1.0):
        return cls(
            centroid_interval=centroid_interval,
            beacon_interval=beacon_interval,
            granularity=beacon_interval / centroid_interval,
            max_beacons=round(centroid_interval / beacon_interval),
            threshold=threshold,
            speed=speed,
            raw_interval=centroid_interval,
        )


def derive_timing(cell_side, speed, target_granularity, threshold):
    """
    Pick integer p and P with p/P = G and P no shorter than the time the
    NTL needs to cross from the center region into a corner region.

    P is the smallest integer multiple of the reduced denominator of G that
    is at least the raw interval; p scales by the same factor.
    """
    if not cell_side > 0:
        raise DomainError('cell side L must be positive')
    if not speed > 0:
        raise DomainError('speed S must be positive')
    if not 0 < target_granularity <= 1:
        raise DomainError('granularity G must lie in (0, 1]')
    if not 0 < threshold <= 1:
        raise DomainError('threshold T must lie in (0, 1]')

    raw = (math.sqrt(5) / 2 - 1) * cell_side / speed
    ratio = Fraction(target_granularity).limit_denominator(MAX_GRANULARITY_DENOMINATOR)
    if abs(float(ratio) - target_granularity) > 1e-9:
        raise PlanningError(
            f'granularity {target_granularity} is not a ratio of integers p/P '
            f'with P <= {MAX_GRANULARITY_DENOMINATOR}'
        )
    scale = max(1, math.ceil(raw / ratio.denominator - 1e-9))
    centroid_interval = ratio.denominator * scale
    beacon_interval = ratio.numerator * scale
    plan = TimingPlan(
        centroid_interval=float(centroid_interval),
        beacon_interval=float(beacon_interval),
        granularity=beacon_interval / centroid_interval,
        max_beacons=round(centroid_interval / beacon_interval),
        threshold=threshold,
        speed=speed,
        raw_interval=raw,
    )
    logger.debug('Derived timing P=%s p=%s from raw %.3f', centroid_interval, beacon_interval, raw)
    return plan


def fine_cnt_limit_bound(r1, centroid_interval, speed):
    ratio = 2 * r1 / (centroid_interval * speed)
    if ratio < 1:
        raise PlanningError(
            f'2*r1/(P*S) = {ratio:.3f} < 1, no fineCntLimit fits; '
            'use a larger cell side or a shorter centroid interval'
        )
    return math.floor(ratio + 1e-9)


@dataclass
class PlanReport:
    cell_side: float
    min_range: float
    rounded_range: int
    range_used: float
    timing: TimingPlan
    candidate_threshold_count: int
    fine_cnt_limit: int
    fine_cnt_limit_bound: int
    theoretical_mae: float
    region_area_fraction: float
    connected: bool
    max_hops: int
    hops: list
    notes: list = field(default_factory=list)

    @property
    def fine_cnt_limit_ok(self):
        return 1 <= self.fine_cnt_limit <= self.fine_cnt_limit_bound

    def to_dict(self):
        data = asdict(self)
        data['fine_cnt_limit_ok'] = self.fine_cnt_limit_ok
        return data


def build_plan(cell_side, speed, granularity, threshold, range_m=None, fine_cnt_limit=4, rows=5, cols=5):
    """Everything an operator needs to size a grid before deploying it."""
    raw_range = min_ntl_range(cell_side)
    timing = derive_timing(cell_side, speed, granularity, threshold)
    bound = fine_cnt_limit_bound(cell_side / 2, timing.centroid_interval, speed)
    notes = []

    model_range = range_m if range_m is not None else raw_range
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', ModelValidityWarning)
        try:
            mae = theoretical_mae(cell_side, model_range)
            fraction = region_area_fraction(cell_side, model_range)
        except DomainError as exc:
            mae = fraction = None
            notes.append(str(exc))
    notes.extend(str(w.message) for w in caught if issubclass(w.category, ModelValidityWarning))

    routing_range = range_m if range_m is not None else rounded_ntl_range(cell_side)
    grid = GridConfig(rows=rows, cols=cols, cell_side=cell_side)
    connectivity = connectivity_graph(grid_positions(grid), routing_range)
    if not connectivity.connected:
        notes.append(f'range {routing_range} m < L = {cell_side} m, grid nodes cannot route to the gateway')
    if not 1 <= fine_cnt_limit <= bound:
        notes.append(f'fineCntLimit {fine_cnt_limit} is outside 1..{bound}')

    return PlanReport(
        cell_side=cell_side,
        min_range=raw_range,
        rounded_range=rounded_ntl_range(cell_side),
        range_used=model_range,
        timing=timing,
        candidate_threshold_count=timing.candidate_threshold_count,
        fine_cnt_limit=fine_cnt_limit,
        fine_cnt_limit_bound=bound,
        theoretical_mae=mae,
        region_area_fraction=fraction,
        connected=connectivity.connected,
        max_hops=connectivity.max_hops,
        hops=[connectivity.hops.get(node) for node in range(grid.node_count)],
        notes=notes,
    )
