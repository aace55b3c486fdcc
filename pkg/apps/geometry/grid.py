"""
Fixed reference-node lattice.

Axis convention: x grows to the right along a row, y grows downwards across
rows, and the origin is the top-left node. Node ids are row-major, so node
``row * cols + col`` sits at ``origin + (col * L, row * L)``.
"""
import math
from dataclasses import dataclass, field

import networkx as nx

from apps.core.exceptions import ConfigurationError, DomainError

# Absolute tolerance for closed-ball range tests.
RANGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Point2D:
    """
    Position in meters.

    x - horizontal coordinate, grows to the right
    y - vertical coordinate, grows downwards
    """
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f'non-finite coordinates ({self.x}, {self.y})')

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    def translated(self, dx, dy):
        return Point2D(self.x + dx, self.y + dy)

    def as_tuple(self):
        return self.x, self.y


ORIGIN = Point2D(0.0, 0.0)


@dataclass(frozen=True)
class GridConfig:
    """
    Rectangular REFN0 lattice.

    rows - number of node rows (along y)
    cols - number of node columns (along x)
    cell_side - cell side L in meters
    origin - position of node 0
    """
    rows: int
    cols: int
    cell_side: float
    origin: Point2D = field(default=ORIGIN)

    def __post_init__(self):
        if self.rows < 2:
            raise ConfigurationError('must be at least 2', field='rows')
        if self.cols < 2:
            raise ConfigurationError('must be at least 2', field='cols')
        if not self.cell_side > 0:
            raise ConfigurationError('must be positive', field='cell_side')

    @property
    def node_count(self):
        return self.rows * self.cols

    @property
    def width(self):
        return (self.cols - 1) * self.cell_side

    @property
    def height(self):
        return (self.rows - 1) * self.cell_side

    def node_position(self, node_id):
        row, col = divmod(node_id, self.cols)
        return Point2D(self.origin.x + col * self.cell_side, self.origin.y + row * self.cell_side)


def grid_positions(cfg):
    return [cfg.node_position(node_id) for node_id in range(cfg.node_count)]


@dataclass
class ConnectivityReport:
    """
    graph - networkx graph, one node per position index
    gateway - node that hop distances are measured from
    hops - hop count from the gateway for every reachable node
    """
    graph: nx.Graph
    gateway: int
    hops: dict

    @property
    def connected(self):
        return len(self.hops) == self.graph.number_of_nodes()

    @property
    def max_hops(self):
        return max(self.hops.values()) if self.connected else None

    @property
    def adjacency(self):
        return {node: sorted(self.graph.neighbors(node)) for node in sorted(self.graph.nodes)}


def connectivity_graph(positions, range_m, gateway=0):
    """Unit-disk graph over ``positions`` with hop distances from ``gateway``."""
    if not positions:
        raise DomainError('at least one position is required')
    if not range_m > 0:
        raise DomainError('range must be positive')
    if not 0 <= gateway < len(positions):
        raise DomainError(f'gateway {gateway} is not a node')

    graph = nx.Graph()
    graph.add_nodes_from(range(len(positions)))
    for i, a in enumerate(positions):
        for j in range(i + 1, len(positions)):
            if a.distance_to(positions[j]) <= range_m + RANGE_TOLERANCE:
                graph.add_edge(i, j)
    hops = dict(nx.single_source_shortest_path_length(graph, gateway))
    return ConnectivityReport(graph=graph, gateway=gateway, hops=hops)


def anchors_in_range(point, positions, range_m):
    return [pos for pos in positions if point.distance_to(pos) <= range_m + RANGE_TOLERANCE]


def has_non_collinear_triple(points, cell_side):
    """True when some three of ``points`` span a triangle of non-negligible area."""
    if len(points) < 3:
        return False
    tolerance = 1e-9 * cell_side ** 2
    base = points[0]
    # Pick the farthest point from base as the second vertex, then any
    # remaining point off that line proves non-collinearity.
    far = max(points[1:], key=base.distance_to)
    if base.distance_to(far) <= RANGE_TOLERANCE:
        return False
    ux, uy = far.x - base.x, far.y - base.y
    return any(abs(ux * (p.y - base.y) - uy * (p.x - base.x)) > tolerance for p in points[1:])
