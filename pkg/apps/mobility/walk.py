"""
Right/down pedestrian walk from the top-left to the bottom-right corner of
the field, one step per second.
"""
import enum
import math
from dataclasses import dataclass, replace

from apps.core.exceptions import ConfigurationError, ContractViolation
from apps.geometry.grid import Point2D

EDGE_TOLERANCE_M = 1e-9


class Direction(enum.Enum):
    RIGHT = 'right'
    DOWN = 'down'

    @property
    def heading(self):
        """Angle from +x towards +y (downwards), radians."""
        return 0.0 if self is Direction.RIGHT else math.pi / 2

    @property
    def unit(self):
        return (1.0, 0.0) if self is Direction.RIGHT else (0.0, 1.0)

    @property
    def other(self):
        return Direction.DOWN if self is Direction.RIGHT else Direction.RIGHT


@dataclass(frozen=True)
class FieldBounds:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ConfigurationError('field must have positive width and height', field='field')

    @classmethod
    def for_grid(cls, grid):
        return cls(grid.origin.x, grid.origin.y, grid.origin.x + grid.width, grid.origin.y + grid.height)

    def contains(self, point):
        return self.x_min <= point.x <= self.x_max and self.y_min <= point.y <= self.y_max


@dataclass(frozen=True)
class MobilityConfig:
    """
    stride_min, stride_max - bounds of the actual stride length, meters
    segment_steps - N, steps walked before the direction is re-drawn
    field - rectangle the walker stays in
    steps_per_second - fixed at one step per second
    """
    stride_min: float
    stride_max: float
    segment_steps: int
    field: FieldBounds
    steps_per_second: int = 1

    def __post_init__(self):
        if not 0 < self.stride_min <= self.stride_max:
            raise ConfigurationError('must satisfy 0 < stride_min <= stride_max', field='stride_min')
        if self.segment_steps < 1:
            raise ConfigurationError('must be at least 1', field='segment_steps')
        if self.steps_per_second != 1:
            raise ConfigurationError('only one step per second is supported', field='steps_per_second')


@dataclass(frozen=True)
class WalkState:
    actual_pos: Point2D
    current_dir: Direction
    steps_in_segment: int = 0
    episode_done: bool = False
    episode: int = 0
    steps: int = 0


@dataclass(frozen=True)
class StepEvent:
    stride: float
    direction: Direction
    start: Point2D
    end: Point2D


def _draw_direction(rng):
    return Direction.RIGHT if rng.random() < 0.5 else Direction.DOWN


def start_walk(cfg, rng, episode=0):
    start = Point2D(cfg.field.x_min, cfg.field.y_min)
    return WalkState(actual_pos=start, current_dir=_draw_direction(rng), episode=episode)


def _room(pos, direction, field):
    return field.x_max - pos.x if direction is Direction.RIGHT else field.y_max - pos.y


def advance_walk(state, cfg, rng):
    """
    Take one step. A direction with at most stride_max of room left gives way
    to the other one whenever the other has more room, so no stride draw
    reaches the edge the walker is heading for. The episode ends once both
    the remaining width and the remaining height are shorter than stride_max.
    """
    if state.episode_done:
        raise ContractViolation('walk episode already reached the bottom-right corner')

    direction, steps_in_segment = state.current_dir, state.steps_in_segment
    if steps_in_segment >= cfg.segment_steps:
        direction, steps_in_segment = _draw_direction(rng), 0
    stride = float(rng.uniform(cfg.stride_min, cfg.stride_max))
    room = _room(state.actual_pos, direction, cfg.field)
    if room <= cfg.stride_max + EDGE_TOLERANCE_M and _room(state.actual_pos, direction.other, cfg.field) > room:
        direction = direction.other

    dx, dy = direction.unit
    end = state.actual_pos.translated(dx * stride, dy * stride)
    done = (cfg.field.x_max - end.x < cfg.stride_max) and (cfg.field.y_max - end.y < cfg.stride_max)
    next_state = replace(
        state,
        actual_pos=end,
        current_dir=direction,
        steps_in_segment=steps_in_segment + 1,
        episode_done=done,
        steps=state.steps + 1,
    )
    return next_state, StepEvent(stride=stride, direction=direction, start=state.actual_pos, end=end)
