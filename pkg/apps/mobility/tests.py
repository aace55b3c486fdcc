import math

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import ConfigurationError, ContractViolation
from apps.geometry.grid import GridConfig, Point2D
from .sensors import ERROR_FREE, SensorErrorModel, sense_step
from .walk import Direction, FieldBounds, MobilityConfig, StepEvent, WalkState, advance_walk, start_walk

DEFAULT_FIELD = FieldBounds.for_grid(GridConfig(rows=5, cols=5, cell_side=75))


def default_mobility(**overrides):
    options = {'stride_min': 0.7, 'stride_max': 0.8, 'segment_steps': 10, 'field': DEFAULT_FIELD}
    options.update(overrides)
    return MobilityConfig(**options)


class AdvanceWalkTests(SimpleTestCase):
    def test_ten_steps_right(self):
        cfg = default_mobility()
        rng = np.random.default_rng(1)
        state = WalkState(actual_pos=Point2D(0, 0), current_dir=Direction.RIGHT)
        strides = []
        for _ in range(10):
            state, event = advance_walk(state, cfg, rng)
            strides.append(event.stride)
            self.assertIs(event.direction, Direction.RIGHT)
        self.assertAlmostEqual(state.actual_pos.x, sum(strides))
        self.assertAlmostEqual(state.actual_pos.x, 7.5, delta=0.5)
        self.assertEqual(state.actual_pos.y, 0)

    def test_unit_strides_make_manhattan_path(self):
        cfg = MobilityConfig(stride_min=1, stride_max=1, segment_steps=1, field=FieldBounds(0, 0, 3, 3))
        rng = np.random.default_rng(2)
        state = start_walk(cfg, rng)
        path = [state.actual_pos]
        while not state.episode_done:
            state, _ = advance_walk(state, cfg, rng)
            path.append(state.actual_pos)
        self.assertEqual(len(path), 7)
        self.assertEqual(path[-1], Point2D(3, 3))
        for a, b in zip(path, path[1:]):
            self.assertAlmostEqual(abs(b.x - a.x) + abs(b.y - a.y), 1)

    def test_direction_forced_at_right_edge(self):
        cfg = default_mobility()
        rng = np.random.default_rng(3)
        start = WalkState(actual_pos=Point2D(DEFAULT_FIELD.x_max - 0.8, 0), current_dir=Direction.RIGHT)
        for _ in range(200):
            state, event = advance_walk(start, cfg, rng)
            self.assertIs(event.direction, Direction.DOWN)
            self.assertEqual(state.actual_pos.x, DEFAULT_FIELD.x_max - 0.8)
            self.assertAlmostEqual(state.actual_pos.y, event.stride)

    def test_direction_kept_with_room_to_spare(self):
        cfg = default_mobility()
        state = WalkState(actual_pos=Point2D(DEFAULT_FIELD.x_max - 0.81, 0), current_dir=Direction.RIGHT)
        state, event = advance_walk(state, cfg, np.random.default_rng(3))
        self.assertIs(event.direction, Direction.RIGHT)
        self.assertLess(state.actual_pos.x, DEFAULT_FIELD.x_max)

    def test_last_strides_head_for_the_roomier_edge(self):
        cfg = default_mobility()
        state = WalkState(
            actual_pos=Point2D(DEFAULT_FIELD.x_max - 0.9, DEFAULT_FIELD.y_max - 0.5), current_dir=Direction.DOWN
        )
        state, event = advance_walk(state, cfg, np.random.default_rng(8))
        self.assertIs(event.direction, Direction.RIGHT)
        self.assertTrue(DEFAULT_FIELD.contains(state.actual_pos))

    def test_direction_redrawn_only_at_segment_boundary(self):
        cfg = default_mobility(segment_steps=5)
        rng = np.random.default_rng(4)
        state = start_walk(cfg, rng)
        directions = []
        for _ in range(40):
            state, event = advance_walk(state, cfg, rng)
            directions.append(event.direction)
        for start in range(0, 40, 5):
            self.assertEqual(len(set(directions[start:start + 5])), 1)

    def test_episode_invariants(self):
        cfg = default_mobility()
        rng = np.random.default_rng(5)
        state = start_walk(cfg, rng)
        length = 0.0
        previous = state.actual_pos
        while not state.episode_done:
            state, event = advance_walk(state, cfg, rng)
            self.assertGreaterEqual(state.actual_pos.x, previous.x)
            self.assertGreaterEqual(state.actual_pos.y, previous.y)
            self.assertTrue(DEFAULT_FIELD.contains(state.actual_pos))
            length += event.stride
            previous = state.actual_pos
        self.assertGreaterEqual(length, state.steps * 0.7)
        self.assertLessEqual(length, state.steps * 0.8)
        self.assertLess(DEFAULT_FIELD.x_max - state.actual_pos.x, 0.8)
        self.assertLess(DEFAULT_FIELD.y_max - state.actual_pos.y, 0.8)

    def test_finished_episode(self):
        state = WalkState(actual_pos=Point2D(300, 300), current_dir=Direction.RIGHT, episode_done=True)
        with self.assertRaises(ContractViolation):
            advance_walk(state, default_mobility(), np.random.default_rng(0))

    def test_invalid_config(self):
        with self.assertRaises(ConfigurationError):
            default_mobility(stride_min=0.9)
        with self.assertRaises(ConfigurationError):
            default_mobility(segment_steps=0)


class SenseStepTests(SimpleTestCase):
    def step(self, direction=Direction.RIGHT, stride=0.8):
        start = Point2D(10, 10)
        dx, dy = direction.unit
        return StepEvent(stride=stride, direction=direction, start=start, end=start.translated(dx * stride, dy * stride))

    def test_error_free_sensors_match_actual(self):
        rng = np.random.default_rng(0)
        for direction in Direction:
            event = self.step(direction)
            dx, dy = sense_step(event, ERROR_FREE, rng).displacement
            self.assertAlmostEqual(dx, event.end.x - event.start.x)
            self.assertAlmostEqual(dy, event.end.y - event.start.y)

    def test_biased_rightward_step(self):
        sensors = SensorErrorModel(stride_accuracy=0.95, detect_accuracy=1, heading_error_deg=5)
        dx, dy = sense_step(self.step(), sensors, np.random.default_rng(0)).displacement
        self.assertAlmostEqual(dx, 0.7571, places=4)
        self.assertAlmostEqual(dy, 0.0662, places=4)

    def test_downward_step_biased_to_the_right(self):
        sensors = SensorErrorModel(stride_accuracy=1, detect_accuracy=1, heading_error_deg=10)
        dx, dy = sense_step(self.step(Direction.DOWN, 1.0), sensors, np.random.default_rng(0)).displacement
        self.assertAlmostEqual(dx, math.sin(math.radians(10)))
        self.assertAlmostEqual(dy, math.cos(math.radians(10)))

    def test_reported_magnitude_is_exact(self):
        sensors = SensorErrorModel(stride_accuracy=0.9, detect_accuracy=1, heading_error_deg=7)
        dx, dy = sense_step(self.step(stride=0.73), sensors, np.random.default_rng(0)).displacement
        self.assertAlmostEqual(math.hypot(dx, dy), 0.9 * 0.73)

    def test_detection_frequency(self):
        sensors = SensorErrorModel(stride_accuracy=1, detect_accuracy=0.9, heading_error_deg=0)
        rng = np.random.default_rng(6)
        event = self.step()
        detected = sum(sense_step(event, sensors, rng).detected for _ in range(10 ** 5))
        self.assertAlmostEqual(detected / 10 ** 5, 0.9, delta=0.005)

    def test_missed_step_has_no_displacement(self):
        sensors = SensorErrorModel(stride_accuracy=1, detect_accuracy=0.5, heading_error_deg=0)
        rng = np.random.default_rng(7)
        missed = next(s for s in (sense_step(self.step(), sensors, rng) for _ in range(100)) if not s.detected)
        self.assertEqual(missed.displacement, (0.0, 0.0))
