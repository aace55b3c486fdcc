import itertools

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import ConfigurationError, ContractViolation
from apps.geometry.grid import GridConfig, Point2D, grid_positions
from .beacons import beacon_schedule, random_phases, window_tally
from .reception import BernoulliDisk, DistanceDecay, IdealDisk, reception_decision


class ReceptionDecisionTests(SimpleTestCase):
    def test_ideal_disk_inside(self):
        self.assertTrue(reception_decision(66, IdealDisk(84), np.random.default_rng(0)))

    def test_every_model_drops_beyond_range(self):
        rng = np.random.default_rng(0)
        for model in (IdealDisk(84), BernoulliDisk(84, 0.1), DistanceDecay(40, 84)):
            self.assertFalse(any(reception_decision(84.0001, model, rng) for _ in range(100)))

    def test_decay_frequency(self):
        rng = np.random.default_rng(11)
        model = DistanceDecay(40, 84)
        self.assertAlmostEqual(model.probability(62), 0.5)
        hits = sum(reception_decision(62, model, rng) for _ in range(10 ** 5))
        self.assertAlmostEqual(hits / 10 ** 5, 0.5, delta=0.01)

    def test_bernoulli_frequency(self):
        rng = np.random.default_rng(12)
        hits = sum(reception_decision(10, BernoulliDisk(84, 0.2), rng) for _ in range(20000))
        self.assertAlmostEqual(hits / 20000, 0.8, delta=0.015)

    def test_probability_non_increasing(self):
        distances = np.linspace(0, 100, 1001)
        for model in (IdealDisk(84), BernoulliDisk(84, 0.3), DistanceDecay(40, 84)):
            probabilities = [model.probability(d) for d in distances]
            self.assertTrue(all(a >= b for a, b in zip(probabilities, probabilities[1:])))
            self.assertEqual(probabilities[-1], 0)

    def test_same_draw_never_flips_to_drop_closer(self):
        model = DistanceDecay(40, 84)
        for draw in np.linspace(0, 0.999, 50):
            decisions = [model.decide(d, draw) for d in range(0, 90)]
            first_drop = decisions.index(False)
            self.assertFalse(any(decisions[first_drop:]))

    def test_invalid_models(self):
        with self.assertRaises(ConfigurationError):
            BernoulliDisk(84, 1.0)
        with self.assertRaises(ConfigurationError):
            DistanceDecay(90, 84)


class BeaconScheduleTests(SimpleTestCase):
    def test_default_grid_emits_25_per_second(self):
        grid = GridConfig(rows=5, cols=5, cell_side=75)
        beacons = list(beacon_schedule(grid, 1, until=9.999))
        self.assertEqual(len(beacons), 250)
        self.assertEqual([b.source_id for b in beacons[:25]], list(range(25)))

    def test_single_node_phase(self):
        grid = GridConfig(rows=2, cols=2, cell_side=1)
        stream = beacon_schedule(grid, 2, phases=[0.5, 1.0, 1.5, 1.9])
        first_node = [b.emit_time for b in itertools.islice(stream, 12) if b.source_id == 0]
        self.assertEqual(first_node, [0.5, 2.5, 4.5])

    def test_interleaving_matches_hand_merge(self):
        grid = GridConfig(rows=2, cols=2, cell_side=1)
        beacons = list(beacon_schedule(grid, 1, phases=[0.75, 0.0, 0.5, 0.25], until=1.5))
        self.assertEqual(
            [(b.emit_time, b.source_id) for b in beacons],
            [(0.0, 1), (0.25, 3), (0.5, 2), (0.75, 0), (1.0, 1), (1.25, 3), (1.5, 2)],
        )

    def test_same_time_ties_break_by_node(self):
        grid = GridConfig(rows=2, cols=2, cell_side=1)
        beacons = list(beacon_schedule(grid, 1, phases=[0.5, 0.5, 0.0, 0.0], until=0.5))
        self.assertEqual([b.source_id for b in beacons], [2, 3, 0, 1])

    def test_phase_out_of_range(self):
        grid = GridConfig(rows=2, cols=2, cell_side=1)
        with self.assertRaises(ConfigurationError):
            next(beacon_schedule(grid, 1, phases=[1.0, 0, 0, 0]))

    def test_random_phases_are_seeded(self):
        first = random_phases(25, 1, np.random.default_rng(3))
        self.assertEqual(first, random_phases(25, 1, np.random.default_rng(3)))
        self.assertTrue(all(0 <= phase < 1 for phase in first))


class WindowTallyTests(SimpleTestCase):
    def test_full_window(self):
        receptions = [(float(t), 'A') for t in range(10)]
        self.assertEqual(window_tally(receptions, 0, 10).counts, {'A': 10})

    def test_empty(self):
        tally = window_tally([], 0, 10)
        self.assertEqual(tally.counts, {})
        self.assertEqual(tally.window_len, 10)

    def test_nine_of_ten(self):
        receptions = [(float(t), 'A') for t in range(10) if t != 4]
        self.assertEqual(window_tally(receptions, 0, 10).counts['A'], 9)

    def test_half_open_window(self):
        receptions = [(9.999, 1), (10.0, 1), (19.999, 2), (20.0, 2)]
        self.assertEqual(window_tally(receptions, 10, 10).counts, {1: 1, 2: 1})

    def test_conservation(self):
        rng = np.random.default_rng(4)
        times = np.sort(rng.uniform(0, 30, 500))
        receptions = [(float(t), int(node)) for t, node in zip(times, rng.integers(0, 25, 500))]
        tally = window_tally(receptions, 10, 10)
        self.assertEqual(tally.total, sum(1 for t, _ in receptions if 10 <= t < 20))

    def test_unsorted(self):
        with self.assertRaises(ContractViolation):
            window_tally([(2.0, 1), (1.0, 1)], 0, 10)

    def test_ideal_disk_fills_every_in_range_count(self):
        grid = GridConfig(rows=5, cols=5, cell_side=75)
        positions = grid_positions(grid)
        model = IdealDisk(84)
        rng = np.random.default_rng(0)
        ntl = Point2D(100, 120)
        receptions = [
            (b.emit_time, b.source_id)
            for b in beacon_schedule(grid, 1, phases=random_phases(25, 1, rng), until=20)
            if reception_decision(ntl.distance_to(b.source_pos), model, rng)
        ]
        tally = window_tally(receptions, 10, 10)
        in_range = {i for i, pos in enumerate(positions) if ntl.distance_to(pos) <= 84}
        self.assertEqual(set(tally.counts), in_range)
        self.assertTrue(all(count == 10 for count in tally.counts.values()))
