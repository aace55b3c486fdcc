from django.test import SimpleTestCase

from .exceptions import ConfigurationError, ContractViolation, DomainError, PlanningError
from .rng import RngLanes, derive_seed, lane_rng


class DeriveSeedTests(SimpleTestCase):
    def test_same_lane_same_seed(self):
        self.assertEqual(derive_seed(7, 'walk'), derive_seed(7, 'walk'))

    def test_lanes_and_seeds_are_distinct(self):
        seeds = {derive_seed(7, 'walk'), derive_seed(7, 'beacon-phase'), derive_seed(8, 'walk')}
        self.assertEqual(len(seeds), 3)

    def test_seed_fits_in_64_bits(self):
        self.assertLess(derive_seed(123, 'reception/4'), 2 ** 64)


class RngLanesTests(SimpleTestCase):
    def test_lane_is_cached(self):
        lanes = RngLanes(1)
        self.assertIs(lanes['walk'], lanes['walk'])

    def test_draws_on_one_lane_do_not_shift_another(self):
        first = RngLanes(5)
        first['walk'].random(100)
        second = RngLanes(5)
        self.assertEqual(first['tdoa/FG'].random(), second['tdoa/FG'].random())

    def test_lane_matches_standalone_generator(self):
        self.assertEqual(RngLanes(3)['sensors/EFG'].random(), lane_rng(3, 'sensors/EFG').random())

    def test_negative_seed_rejected(self):
        with self.assertRaises(ValueError):
            RngLanes(-1)


class ExitCodeTests(SimpleTestCase):
    def test_validation_errors_exit_with_3(self):
        for error in (ConfigurationError('bad'), DomainError('bad'), PlanningError('bad')):
            self.assertEqual(error.exit_code, 3)

    def test_runtime_errors_exit_with_4(self):
        self.assertEqual(ContractViolation('late').exit_code, 4)

    def test_configuration_error_names_field(self):
        self.assertEqual(str(ConfigurationError('must be positive', field='grid.rows')), 'grid.rows: must be positive')
