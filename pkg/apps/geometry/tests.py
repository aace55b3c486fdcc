import json
import math
import warnings
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.core.exceptions import ConfigurationError, DomainError, ModelValidityWarning, PlanningError
from .grid import GridConfig, Point2D, connectivity_graph, grid_positions, has_non_collinear_triple
from .oracles import (
    Region,
    RegionModel,
    monte_carlo_analytical_mae,
    region_area_fraction,
    region_classify,
    theoretical_mae,
    verify_three_anchor_coverage,
)
from .planner import build_plan, derive_timing, fine_cnt_limit_bound, min_ntl_range, rounded_ntl_range

ROOT5_HALF = math.sqrt(5) / 2


class GridPositionsTests(SimpleTestCase):
    def test_default_grid_spans_field(self):
        points = grid_positions(GridConfig(rows=5, cols=5, cell_side=75))
        self.assertEqual(len(points), 25)
        self.assertEqual(points[0], Point2D(0, 0))
        self.assertEqual(points[-1], Point2D(300, 300))

    def test_unit_cell(self):
        points = grid_positions(GridConfig(rows=2, cols=2, cell_side=1))
        self.assertEqual(points, [Point2D(0, 0), Point2D(1, 0), Point2D(0, 1), Point2D(1, 1)])

    def test_rows_run_along_y(self):
        points = grid_positions(GridConfig(rows=3, cols=2, cell_side=10, origin=Point2D(5, 5)))
        self.assertEqual(len(points), 6)
        self.assertEqual(max(p.x for p in points), 15)
        self.assertEqual(max(p.y for p in points), 25)
        self.assertEqual(points[1], Point2D(15, 5))

    def test_invalid_config(self):
        with self.assertRaises(ConfigurationError):
            GridConfig(rows=1, cols=5, cell_side=75)
        with self.assertRaises(ConfigurationError):
            GridConfig(rows=5, cols=5, cell_side=0)

    def test_point_rejects_nan(self):
        with self.assertRaises(DomainError):
            Point2D(float('nan'), 0)


class MinRangeTests(SimpleTestCase):
    def test_default_cell(self):
        self.assertAlmostEqual(min_ntl_range(75), 83.8525, places=3)
        self.assertEqual(rounded_ntl_range(75), 84)

    def test_small_cell(self):
        self.assertAlmostEqual(min_ntl_range(2), 2.2360679, places=6)

    def test_scale_invariance(self):
        for cell_side in (1e-6, 1, 33.3, 1000):
            self.assertAlmostEqual(min_ntl_range(cell_side) / cell_side, ROOT5_HALF)

    def test_non_positive_cell(self):
        with self.assertRaises(DomainError):
            min_ntl_range(0)


class DeriveTimingTests(SimpleTestCase):
    def test_default_timing(self):
        plan = derive_timing(75, 1, 0.1, 0.9)
        self.assertAlmostEqual(plan.raw_interval, 8.85, delta=0.01)
        self.assertEqual(plan.centroid_interval, 10)
        self.assertEqual(plan.beacon_interval, 1)
        self.assertEqual(plan.max_beacons, 10)
        self.assertEqual(plan.candidate_threshold_count, 9)

    def test_doubling_speed_halves_raw_interval(self):
        self.assertAlmostEqual(derive_timing(75, 2, 0.1, 0.9).raw_interval, 4.425, delta=0.001)

    def test_wide_cell(self):
        plan = derive_timing(150, 1, 0.1, 0.9)
        self.assertAlmostEqual(plan.raw_interval, 17.7, delta=0.01)
        self.assertEqual((plan.centroid_interval, plan.beacon_interval), (20, 2))

    def test_non_unit_numerator(self):
        plan = derive_timing(75, 1, 0.3, 0.9)
        self.assertEqual((plan.centroid_interval, plan.beacon_interval), (10, 3))

    def test_irrational_granularity(self):
        with self.assertRaises(PlanningError):
            derive_timing(75, 1, 1 / math.pi, 0.9)

    def test_invalid_threshold(self):
        with self.assertRaises(DomainError):
            derive_timing(75, 1, 0.1, 0)


class FineCntLimitBoundTests(SimpleTestCase):
    def test_default_bound(self):
        self.assertEqual(fine_cnt_limit_bound(37.5, 10, 1), 7)
        self.assertLessEqual(4, fine_cnt_limit_bound(37.5, 10, 1))

    def test_boundary(self):
        self.assertEqual(fine_cnt_limit_bound(5, 10, 1), 1)

    def test_faster_walker(self):
        self.assertEqual(fine_cnt_limit_bound(37.5, 10, 2), 3)

    def test_bound_brackets_ratio(self):
        for r1, interval, speed in ((37.5, 10, 1), (20, 3, 1.5), (50, 7, 0.9)):
            bound = fine_cnt_limit_bound(r1, interval, speed)
            self.assertLessEqual(bound * interval * speed, 2 * r1)
            self.assertLess(2 * r1, (bound + 1) * interval * speed)

    def test_no_bound(self):
        with self.assertRaises(PlanningError):
            fine_cnt_limit_bound(4, 10, 1)


class TheoreticalMaeTests(SimpleTestCase):
    def test_default_cell(self):
        self.assertAlmostEqual(theoretical_mae(75, 75 * ROOT5_HALF), 23.99, delta=0.01)

    def test_ratio_at_bound(self):
        for cell_side in (1, 25, 75, 300):
            self.assertAlmostEqual(theoretical_mae(cell_side, cell_side * ROOT5_HALF) / cell_side, 0.3199, delta=1e-4)

    def test_single_region(self):
        self.assertAlmostEqual(theoretical_mae(60, 60), 20)

    def test_range_below_cell(self):
        with self.assertRaises(DomainError):
            theoretical_mae(75, 74)

    def test_range_above_model_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            theoretical_mae(75, 90)
        self.assertTrue(any(issubclass(w.category, ModelValidityWarning) for w in caught))


class RegionTests(SimpleTestCase):
    def setUp(self):
        self.model = RegionModel.for_cell(75, 83.85)
        self.anchor = Point2D(0, 0)

    def test_center(self):
        self.assertEqual(region_classify(Point2D(37.5, 37.5), self.model, self.anchor).region, Region.CENTER)

    def test_corner(self):
        hit = region_classify(Point2D(75, 75), self.model, self.anchor)
        self.assertEqual((hit.region, hit.corner), (Region.CORNER, 'C'))
        self.assertEqual(region_classify(self.anchor, self.model, self.anchor).corner, 'A')

    def test_hand_computed_point(self):
        self.assertEqual(region_classify(Point2D(20, 20), self.model, self.anchor).region, Region.CENTER)

    def test_gap_between_regions(self):
        self.assertEqual(region_classify(Point2D(10, 8), self.model, self.anchor).region, Region.OTHER)

    def test_outside_cell(self):
        with self.assertRaises(DomainError):
            region_classify(Point2D(80, 10), self.model, self.anchor)

    def test_area_fraction(self):
        self.assertAlmostEqual(region_area_fraction(75, 75 * ROOT5_HALF), 0.8292, delta=1e-3)
        self.assertAlmostEqual(region_area_fraction(1, ROOT5_HALF), 0.82915, delta=1e-4)
        self.assertAlmostEqual(region_area_fraction(10, 10), math.pi / 4)

    def test_area_fraction_grows_with_range(self):
        fractions = [region_area_fraction(75, r) for r in (75, 77, 79.5, 81, 83.85)]
        self.assertEqual(fractions, sorted(fractions))


class MonteCarloMaeTests(SimpleTestCase):
    def test_agrees_with_closed_form(self):
        estimate = monte_carlo_analytical_mae(75, 83.8525, 10 ** 6, seed=1)
        self.assertAlmostEqual(estimate / theoretical_mae(75, 83.8525), 1, delta=0.01)

    def test_single_region(self):
        self.assertAlmostEqual(monte_carlo_analytical_mae(30, 30, 10 ** 5, seed=2) / 10, 1, delta=0.01)

    def test_unit_cell(self):
        self.assertAlmostEqual(monte_carlo_analytical_mae(1, ROOT5_HALF, 10 ** 5, seed=3), 0.3199, delta=0.0032)

    def test_seeded(self):
        self.assertEqual(
            monte_carlo_analytical_mae(75, 80, 10 ** 5, seed=4),
            monte_carlo_analytical_mae(75, 80, 10 ** 5, seed=4),
        )

    def test_too_few_samples(self):
        with self.assertRaises(DomainError):
            monte_carlo_analytical_mae(75, 80, 1000, seed=1)


class CoverageTests(SimpleTestCase):
    def test_holds_at_bound(self):
        report = verify_three_anchor_coverage(75, 75 * ROOT5_HALF, 10 ** 5, seed=1)
        self.assertTrue(report.ok)
        self.assertGreaterEqual(report.anchors_found, 3)

    def test_fails_just_below_bound(self):
        report = verify_three_anchor_coverage(75, 0.99 * 75 * ROOT5_HALF, 10 ** 5, seed=1)
        self.assertFalse(report.ok)
        self.assertLessEqual(report.anchors_found, 2)

    def test_short_range_fails_at_corner(self):
        report = verify_three_anchor_coverage(75, 0.9 * 75, 1000, seed=1)
        self.assertFalse(report.ok)
        self.assertEqual(report.anchors_found, 1)

    def test_double_range(self):
        self.assertTrue(verify_three_anchor_coverage(10, 20, 1000, seed=5).ok)

    def test_collinear_triple(self):
        line = [Point2D(0, 0), Point2D(75, 0), Point2D(150, 0)]
        self.assertFalse(has_non_collinear_triple(line, 75))
        self.assertTrue(has_non_collinear_triple(line + [Point2D(0, 75)], 75))


class ConnectivityTests(SimpleTestCase):
    def setUp(self):
        self.positions = grid_positions(GridConfig(rows=5, cols=5, cell_side=75))

    def test_default_range_connects_lattice(self):
        report = connectivity_graph(self.positions, 84)
        self.assertTrue(report.connected)
        self.assertEqual(report.adjacency[0], [1, 5])
        self.assertEqual(report.max_hops, 8)

    def test_short_range_is_edgeless(self):
        report = connectivity_graph(self.positions, 74)
        self.assertEqual(report.graph.number_of_edges(), 0)
        self.assertFalse(report.connected)
        self.assertIsNone(report.max_hops)

    def test_diagonal_range(self):
        report = connectivity_graph(self.positions, 107)
        self.assertIn(6, report.adjacency[0])
        self.assertEqual(report.hops[24], 4)

    def test_connected_iff_range_reaches_neighbor(self):
        self.assertTrue(connectivity_graph(self.positions, 75).connected)
        self.assertFalse(connectivity_graph(self.positions, 74.99).connected)


class PlanTests(SimpleTestCase):
    def test_default_plan(self):
        report = build_plan(75, 1, 0.1, 0.9)
        self.assertEqual(report.rounded_range, 84)
        self.assertEqual(report.fine_cnt_limit_bound, 7)
        self.assertTrue(report.fine_cnt_limit_ok)
        self.assertTrue(report.connected)
        self.assertAlmostEqual(report.theoretical_mae, 24.0, delta=0.05)
        self.assertEqual(report.notes, [])

    def test_range_below_cell_is_reported(self):
        report = build_plan(75, 1, 0.1, 0.9, range_m=70)
        self.assertIsNone(report.theoretical_mae)
        self.assertFalse(report.connected)
        self.assertTrue(report.notes)


class PlanCommandTests(SimpleTestCase):
    def test_text_output(self):
        out = StringIO()
        call_command('plan', '--L', '75', '--S', '1', '--G', '0.1', '--T', '0.9', stdout=out)
        output = out.getvalue()
        self.assertIn('83.85 m -> 84 m', output)
        self.assertIn('Centroid interval P:    10 s', output)
        self.assertIn('(bound 7)', output)
        self.assertIn('Theoretical MAE:        24.0 m', output)

    def test_scaled_cell(self):
        out = StringIO()
        call_command('plan', '--L', '150', '--S', '1', '--G', '0.1', '--T', '0.9', '--format', 'json', stdout=out)
        payload = json.loads(out.getvalue())
        self.assertAlmostEqual(payload['theoretical_mae'], 48.0, delta=0.05)
        self.assertEqual(payload['timing']['centroid_interval'], 20)

    def test_zero_cell_is_validation_error(self):
        with self.assertRaises(CommandError) as cm:
            call_command('plan', '--L', '0', '--S', '1', '--G', '0.1', '--T', '0.9', stdout=StringIO())
        self.assertEqual(cm.exception.returncode, 3)

    def test_missing_flag(self):
        with self.assertRaises(CommandError):
            call_command('plan', '--L', '75', stdout=StringIO())
