import hashlib
import io
import json
import math
import tempfile
from pathlib import Path

import pandas as pd
from django.test import SimpleTestCase

from apps.core.exceptions import EmptyTraceError, UndefinedOverhead
from apps.geometry.grid import Point2D
from apps.localization.profiles import LocationEstimate, Method
from apps.simulation.trace import Trace, TraceSample
from .export import TRACE_COLUMNS, trace_csv, trace_digest, write_json, write_sweep_csv, write_trace_csv
from .report import (
    ERROR_BOUNDS,
    compare_theory,
    compute_metrics,
    error_index,
    fgl_overhead,
    mae_ordering,
    merge_reports,
)

ORIGIN = Point2D(0.0, 0.0)


def sample(time, error, label='CG', method=Method.COARSE):
    if method is Method.NONE:
        return TraceSample(time, label, ORIGIN, LocationEstimate(None, Method.NONE, time))
    return TraceSample(time, label, ORIGIN, LocationEstimate(Point2D(float(error), 0.0), method, time))


def make_trace(errors, label='CG', fgl=0, warmup=0):
    samples = [sample(t, None, label, Method.NONE) for t in range(1, warmup + 1)]
    samples += [sample(warmup + i + 1, e, label) for i, e in enumerate(errors)]
    trace = Trace(scenario_name='unit', master_seed=0, samples=samples)
    trace.fgl_events = [(10 * (i + 1), label) for i in range(fgl)]
    return trace


class ErrorIndexTests(SimpleTestCase):
    def test_bounds_are_inclusive(self):
        self.assertEqual(list(error_index([0, 2, 2.01, 10, 75, 75.5])), [1, 1, 2, 3, 7, 8])

    def test_ten_meters_is_index_three(self):
        self.assertEqual(error_index([10.0])[0], 3)


class ComputeMetricsTests(SimpleTestCase):
    def test_hand_example(self):
        report = compute_metrics(make_trace([3, 4]), 'CG')
        self.assertEqual(report.n_samples, 2)
        self.assertAlmostEqual(report.cle, 7)
        self.assertAlmostEqual(report.mae, 3.5)
        self.assertAlmostEqual(report.rmse, math.sqrt(12.5))
        self.assertEqual(report.within_bound[1], 0)
        self.assertEqual(report.within_bound[2], 1)

    def test_warmup_excluded(self):
        report = compute_metrics(make_trace([3, 4], warmup=5), 'CG')
        self.assertEqual(report.warmup, 5)
        self.assertEqual(report.n_samples, 2)
        self.assertAlmostEqual(report.mae, 3.5)

    def test_within_bound_is_monotone(self):
        report = compute_metrics(make_trace([1, 4, 9, 15, 25, 45, 70, 90, 3, 12]), 'CG')
        values = [report.within_bound[k] for k in range(1, len(ERROR_BOUNDS) + 1)]
        self.assertEqual(values, sorted(values))
        self.assertAlmostEqual(report.within_10m, 0.4)

    def test_histogram_covers_every_sample(self):
        errors = [1, 4, 9, 15, 25, 45, 70, 90]
        report = compute_metrics(make_trace(errors), 'CG')
        self.assertEqual(report.index_histogram, {k: 1 for k in range(1, 9)})
        self.assertEqual(sum(report.index_histogram.values()), report.n_samples)

    def test_rmse_not_below_mae(self):
        report = compute_metrics(make_trace([0.5, 7, 33, 2, 80]), 'CG')
        self.assertGreaterEqual(report.rmse, report.mae)

    def test_counts_fine_fixes(self):
        self.assertEqual(compute_metrics(make_trace([1, 2], fgl=3), 'CG').fgl_count, 3)

    def test_unknown_label(self):
        with self.assertRaises(EmptyTraceError):
            compute_metrics(make_trace([1]), 'FG')

    def test_no_estimate_at_all(self):
        with self.assertRaises(EmptyTraceError):
            compute_metrics(make_trace([], warmup=4), 'CG')

    def test_to_dict_has_string_keys(self):
        data = compute_metrics(make_trace([3, 4]), 'CG').to_dict()
        self.assertIn('3', data['within_bound'])
        self.assertIn('8', data['index_histogram'])
        json.dumps(data)


class MergeReportsTests(SimpleTestCase):
    def test_merge_matches_concatenation(self):
        first, second = [1, 4, 9, 30], [2, 80, 11]
        merged = merge_reports([compute_metrics(make_trace(first), 'CG'), compute_metrics(make_trace(second), 'CG')])
        whole = compute_metrics(make_trace(first + second), 'CG')
        self.assertEqual(merged.n_samples, whole.n_samples)
        self.assertAlmostEqual(merged.cle, whole.cle)
        self.assertAlmostEqual(merged.mae, whole.mae)
        self.assertAlmostEqual(merged.rmse, whole.rmse)
        for k in whole.within_bound:
            self.assertAlmostEqual(merged.within_bound[k], whole.within_bound[k])
        self.assertEqual(merged.index_histogram, whole.index_histogram)

    def test_empty(self):
        with self.assertRaises(EmptyTraceError):
            merge_reports([])


class OverheadTests(SimpleTestCase):
    def test_relative_extra_fixes(self):
        improved = compute_metrics(make_trace([1], label='FG-Improved', fgl=108), 'FG-Improved')
        baseline = compute_metrics(make_trace([1], label='FG', fgl=100), 'FG')
        self.assertAlmostEqual(fgl_overhead(improved, baseline), 0.08)

    def test_baseline_without_fixes(self):
        improved = compute_metrics(make_trace([1], label='FG-Improved', fgl=3), 'FG-Improved')
        baseline = compute_metrics(make_trace([1], label='FG'), 'FG')
        with self.assertRaises(UndefinedOverhead):
            fgl_overhead(improved, baseline)


class TheoryComparisonTests(SimpleTestCase):
    def test_relative_delta(self):
        comparison = compare_theory(22.0, 60, 60)
        self.assertAlmostEqual(comparison.theory, 20)
        self.assertAlmostEqual(comparison.relative_delta, 0.10)


class MaeOrderingTests(SimpleTestCase):
    def reports(self, maes):
        return [compute_metrics(make_trace([mae], label=label), label) for label, mae in maes.items()]

    def test_holds(self):
        ordering = mae_ordering(self.reports({'EFG': 2, 'FG': 5, 'CG': 20}), ['EFG', 'FG', 'CG'])
        self.assertTrue(ordering.holds)
        self.assertEqual(ordering.maes, [2, 5, 20])

    def test_broken(self):
        self.assertFalse(mae_ordering(self.reports({'EFG': 6, 'FG': 5}), ['EFG', 'FG']).holds)


class ExportTests(SimpleTestCase):
    def setUp(self):
        self.trace = make_trace([3.25], warmup=1)

    def test_columns_and_empty_cells(self):
        frame = pd.read_csv(io.StringIO(trace_csv(self.trace)), keep_default_na=False)
        self.assertEqual(list(frame.columns), TRACE_COLUMNS)
        first, second = frame.to_dict('records')
        self.assertEqual(first['method'], 'none')
        self.assertEqual(first['est_x_m'], '')
        self.assertEqual(first['abs_error_m'], '')
        self.assertEqual(second['method'], 'coarse')

    def test_fixed_float_format(self):
        lines = trace_csv(self.trace).splitlines()
        self.assertEqual(lines[2], '2,CG,0.000000,0.000000,3.250000,0.000000,coarse,3.250000')

    def test_written_digest_matches_bytes(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'nested' / 'trace.csv'
            digest = write_trace_csv(self.trace, path)
            self.assertEqual(digest, hashlib.sha256(path.read_bytes()).hexdigest())
        self.assertEqual(digest, trace_digest(self.trace))

    def test_json_is_sorted(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'report.json'
            write_json(path, {'b': 1, 'a': 'é'})
            text = path.read_text(encoding='utf-8')
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertIn('é', text)

    def test_sweep_csv_carries_schema_version(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'sweep.csv'
            write_sweep_csv([{'ntl_label': 'CG', 'mae_m': 1.5}], path)
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ['schema_version', 'ntl_label', 'mae_m'])
        self.assertEqual(frame.loc[0, 'schema_version'], 1)
