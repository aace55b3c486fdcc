from dataclasses import replace
from pathlib import Path

from django.conf import settings

from apps.core.exceptions import ConfigurationError
from apps.simulation.loader import load_scenario


def add_scenario_arguments(parser):
    parser.add_argument(
        'scenario', nargs='?', default=settings.GRADELOC['DEFAULT_SCENARIO'],
        help='Scenario JSON file or the name of a shipped scenario',
    )
    parser.add_argument('--seed', type=int, help='Override the scenario master seed')
    parser.add_argument('--samples', type=int, help='Override target_samples (simulated seconds)')
    parser.add_argument('--output', help='Output directory (default: GRADELOC_OUTPUT_DIR)')
    parser.add_argument('--no-store', action='store_true', help='Do not record the run in the database')


def scenario_from_options(options):
    scenario = load_scenario(options['scenario'], seed=options['seed'])
    if options['samples'] is not None:
        if options['samples'] < 1:
            raise ConfigurationError('must be at least 1', field='samples')
        scenario = replace(scenario, duration=options['samples'])
    return scenario


def output_dir(options):
    return Path(options['output'] or settings.GRADELOC['OUTPUT_DIR'])
