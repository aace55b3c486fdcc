import math

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import ConfigurationError, ContractViolation, FineLocalizationUnavailable, NoCandidates
from apps.geometry.grid import GridConfig, Point2D, grid_positions
from apps.mobility.sensors import ERROR_FREE, SensedStep, SensorErrorModel, sense_step
from apps.mobility.walk import Direction, StepEvent
from apps.radio.beacons import BeaconTally
from .profiles import Method, NtlProfile, NtlState
from .state_machine import candidate_set, centroid, current_estimate, dead_reckon_accumulate, ntl_update
from .tdoa import TdoaErrorModel, fix_geometry_available, tdoa_fix

POSITIONS = grid_positions(GridConfig(rows=5, cols=5, cell_side=75))
FANG = TdoaErrorModel(1, 5)


def make_profile(label='CG', coarse=True, fine=False, self_localize=False, limit=100, threshold=0.9):
    return NtlProfile(
        label=label,
        coarse_grained=coarse,
        fine_grained=fine,
        self_localize=self_localize,
        fine_cnt_limit=limit,
        threshold=threshold,
        max_beacons=10,
        centroid_interval=10,
    )


def tally(counts, start=0):
    return BeaconTally(window_start=start, window_len=10, counts=counts)


CELL_CORNERS = tally({0: 10, 1: 10, 5: 10, 6: 10})
ACTUAL = Point2D(40, 35)


class CandidateSetTests(SimpleTestCase):
    def test_threshold_selects_nodes(self):
        result = candidate_set(tally({0: 10, 1: 9, 2: 8}), make_profile(), POSITIONS)
        self.assertEqual(result, [POSITIONS[0], POSITIONS[1]])

    def test_all_zero(self):
        self.assertEqual(candidate_set(tally({0: 0, 1: 0}), make_profile(), POSITIONS), [])

    def test_ceiling_rule(self):
        result = candidate_set(tally({3: 5, 4: 4}), make_profile(threshold=0.5), POSITIONS)
        self.assertEqual(result, [POSITIONS[3]])


class CentroidTests(SimpleTestCase):
    def test_cell_corners_give_center(self):
        self.assertEqual(centroid(candidate_set(CELL_CORNERS, make_profile(), POSITIONS)), Point2D(37.5, 37.5))

    def test_single_point(self):
        self.assertEqual(centroid([Point2D(3, 4)]), Point2D(3, 4))

    def test_triangle(self):
        self.assertEqual(centroid([Point2D(0, 0), Point2D(75, 0), Point2D(0, 75)]), Point2D(25, 25))

    def test_empty(self):
        with self.assertRaises(NoCandidates):
            centroid([])


class TdoaFixTests(SimpleTestCase):
    def test_error_free_model(self):
        self.assertEqual(tdoa_fix(ACTUAL, TdoaErrorModel(0, 0), np.random.default_rng(0)), ACTUAL)

    def test_error_bounds_hold_for_every_fix(self):
        rng = np.random.default_rng(1)
        errors = np.array([tdoa_fix(ACTUAL, FANG, rng).distance_to(ACTUAL) for _ in range(10 ** 5)])
        self.assertGreaterEqual(errors.min(), math.sqrt(2) - 1e-9)
        self.assertLessEqual(errors.max(), 5 * math.sqrt(2) + 1e-9)

    def test_mean_error_matches_integral(self):
        rng = np.random.default_rng(2)
        errors = [tdoa_fix(ACTUAL, FANG, rng).distance_to(ACTUAL) for _ in range(10 ** 4)]
        edges = np.linspace(1, 5, 801)
        mid = (edges[:-1] + edges[1:]) / 2
        ex, ey = np.meshgrid(mid, mid)
        expected = np.hypot(ex, ey).mean()
        self.assertAlmostEqual(expected, 4.34, delta=0.02)
        self.assertAlmostEqual(float(np.mean(errors)), expected, delta=0.05)

    def test_both_signs_occur(self):
        rng = np.random.default_rng(3)
        offsets = {(fix.x > ACTUAL.x, fix.y > ACTUAL.y) for fix in (tdoa_fix(ACTUAL, FANG, rng) for _ in range(200))}
        self.assertEqual(len(offsets), 4)

    def test_collinear_anchors(self):
        line = [Point2D(0, 0), Point2D(75, 0), Point2D(150, 0)]
        with self.assertRaises(FineLocalizationUnavailable):
            tdoa_fix(Point2D(75, 0), FANG, np.random.default_rng(0), anchors=line, ntl_range=84, cell_side=75)

    def test_collinearity_tolerance_follows_cell_side(self):
        anchors = [Point2D(0, 0), Point2D(1, 0), Point2D(0.5, 1e-6)]
        actual = Point2D(0.5, 0)
        self.assertTrue(fix_geometry_available(actual, anchors, ntl_range=1000, cell_side=1))
        self.assertFalse(fix_geometry_available(actual, anchors, ntl_range=1000, cell_side=1000))
        fix = tdoa_fix(actual, FANG, np.random.default_rng(0), anchors=anchors, ntl_range=1000, cell_side=1)
        self.assertGreater(fix.distance_to(actual), 1)

    def test_anchor_check_needs_cell_side(self):
        with self.assertRaises(ContractViolation):
            tdoa_fix(ACTUAL, FANG, np.random.default_rng(0), anchors=POSITIONS, ntl_range=84)

    def test_presets(self):
        self.assertEqual(TdoaErrorModel.preset('fang'), FANG)
        with self.assertRaises(ConfigurationError):
            TdoaErrorModel.preset('newton')


class ProfileTests(SimpleTestCase):
    def test_self_localize_requires_fine(self):
        with self.assertRaises(ConfigurationError):
            make_profile(self_localize=True)

    def test_kinds(self):
        self.assertEqual(make_profile().kind, 'CG')
        self.assertEqual(make_profile(fine=True).kind, 'FG')
        self.assertEqual(make_profile(fine=True, self_localize=True).kind, 'EFG')


class NtlUpdateTests(SimpleTestCase):
    def update(self, state, counts, profile, rng, now=10, ntl_range=None):
        return ntl_update(state, counts, ACTUAL, profile, FANG, rng, now, POSITIONS, ntl_range=ntl_range, cell_side=75)

    def test_coarse_ntl_reports_center(self):
        state, estimate, fired = self.update(NtlState(), CELL_CORNERS, make_profile(), np.random.default_rng(0))
        self.assertEqual(estimate.pos, Point2D(37.5, 37.5))
        self.assertIs(estimate.method, Method.COARSE)
        self.assertFalse(fired)
        self.assertEqual(state.fgl_count, 0)

    def test_fine_ntl_fires_on_change(self):
        profile = make_profile('FG', fine=True)
        state, estimate, fired = self.update(NtlState(), CELL_CORNERS, profile, np.random.default_rng(0))
        self.assertTrue(fired)
        self.assertIs(estimate.method, Method.FINE)
        self.assertLessEqual(estimate.pos.distance_to(ACTUAL), 5 * math.sqrt(2))
        state, _, fired = self.update(state, tally({1: 10, 2: 10, 6: 10, 7: 10}), profile, np.random.default_rng(1), now=20)
        self.assertTrue(fired)
        self.assertEqual(state.fgl_count, 2)

    def test_out_of_turn_fix_after_limit(self):
        profile = make_profile('FG-Improved', fine=True, limit=4)
        rng = np.random.default_rng(0)
        state, fires = NtlState(), []
        for k in range(9):
            state, _, fired = self.update(state, CELL_CORNERS, profile, rng, now=10 * (k + 1))
            fires.append(fired)
        self.assertEqual(fires, [True, False, False, False, True, False, False, False, True])

    def test_large_limit_only_fires_on_change(self):
        profile = make_profile('FG', fine=True, limit=100)
        rng = np.random.default_rng(0)
        state = NtlState()
        for k in range(50):
            state, _, _ = self.update(state, CELL_CORNERS, profile, rng, now=10 * (k + 1))
        self.assertEqual(state.fgl_count, 1)
        self.assertEqual(state.unchanged_count, 49)

    def test_fine_ntl_holds_last_fix(self):
        profile = make_profile('FG', fine=True)
        rng = np.random.default_rng(0)
        state, first, _ = self.update(NtlState(), CELL_CORNERS, profile, rng)
        state, second, _ = self.update(state, CELL_CORNERS, profile, rng, now=20)
        self.assertEqual(first.pos, second.pos)

    def test_empty_window_before_any_centroid(self):
        state, estimate, fired = self.update(NtlState(), tally({0: 3}), make_profile(), np.random.default_rng(0))
        self.assertIs(estimate.method, Method.NONE)
        self.assertIsNone(estimate.pos)
        self.assertFalse(fired)

    def test_empty_window_keeps_previous_estimate(self):
        rng = np.random.default_rng(0)
        state, first, _ = self.update(NtlState(), CELL_CORNERS, make_profile(), rng)
        state, second, _ = self.update(state, tally({}), make_profile(), rng, now=20)
        self.assertEqual(second.pos, first.pos)
        self.assertEqual(state.unchanged_count, 1)

    def test_missing_anchor_geometry_is_counted(self):
        profile = make_profile('FG', fine=True)
        state, estimate, fired = self.update(NtlState(), CELL_CORNERS, profile, np.random.default_rng(0), ntl_range=10)
        self.assertFalse(fired)
        self.assertEqual(state.fgl_unavailable, 1)
        self.assertIs(estimate.method, Method.COARSE)

    def test_paired_trigger_counts(self):
        rng = np.random.default_rng(9)
        windows = [tally({int(node): 10 for node in rng.choice(25, size=4, replace=False)}) for _ in range(30)]
        windows = [w for w in windows for _ in range(int(rng.integers(1, 8)))]
        counts = {}
        for profile in (make_profile(), make_profile('FG', fine=True), make_profile('FG-Improved', fine=True, limit=4)):
            state = NtlState()
            fix_rng = np.random.default_rng(0)
            for k, window in enumerate(windows):
                state, _, _ = self.update(state, window, profile, fix_rng, now=10 * (k + 1))
            counts[profile.label] = state.fgl_count
        self.assertEqual(counts['CG'], 0)
        self.assertGreaterEqual(counts['FG-Improved'], counts['FG'])
        self.assertGreater(counts['FG-Improved'], counts['FG'])


class DeadReckoningTests(SimpleTestCase):
    def setUp(self):
        self.profile = make_profile('EFG', fine=True, self_localize=True, limit=4)

    def walk_right(self, state, sensors, steps, stride=0.75):
        rng = np.random.default_rng(0)
        start = Point2D(0, 0)
        event = StepEvent(stride=stride, direction=Direction.RIGHT, start=start, end=start.translated(stride, 0))
        for _ in range(steps):
            state = dead_reckon_accumulate(state, sense_step(event, sensors, rng), self.profile)
        return state

    def test_error_free_steps(self):
        state = self.walk_right(NtlState(), ERROR_FREE, 5)
        self.assertAlmostEqual(state.dead_reckon_offset[0], 3.75)
        self.assertAlmostEqual(state.dead_reckon_offset[1], 0)

    def test_biased_steps(self):
        sensors = SensorErrorModel(stride_accuracy=0.95, detect_accuracy=1, heading_error_deg=5)
        dx, dy = self.walk_right(NtlState(), sensors, 100).dead_reckon_offset
        self.assertAlmostEqual(dx, 70.98, delta=0.01)
        self.assertAlmostEqual(dy, 6.21, delta=0.01)

    def test_undetected_steps(self):
        missed = SensedStep(detected=False, reported_stride=0.7, reported_heading=0)
        state = NtlState()
        for _ in range(10):
            state = dead_reckon_accumulate(state, missed, self.profile)
        self.assertEqual(state.dead_reckon_offset, (0.0, 0.0))
        self.assertEqual(state.steps_since_fix, 10)

    def test_estimate_is_fix_plus_sensed_steps(self):
        rng = np.random.default_rng(0)
        state, _, _ = ntl_update(NtlState(), CELL_CORNERS, ACTUAL, self.profile, FANG, rng, 10, POSITIONS)
        sensors = SensorErrorModel(stride_accuracy=0.9, detect_accuracy=0.9, heading_error_deg=10)
        state = self.walk_right(state, sensors, 7)
        estimate = current_estimate(state, self.profile, 17)
        self.assertIs(estimate.method, Method.DEAD_RECKONED)
        self.assertAlmostEqual(estimate.pos.x - state.last_fix.x, state.dead_reckon_offset[0])
        self.assertAlmostEqual(estimate.pos.y - state.last_fix.y, state.dead_reckon_offset[1])

    def test_non_efg_profile(self):
        with self.assertRaises(ContractViolation):
            dead_reckon_accumulate(NtlState(), SensedStep(True, 0.7, 0.0), make_profile('FG', fine=True))
