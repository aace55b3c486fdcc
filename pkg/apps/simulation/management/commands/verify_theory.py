import math
import warnings
from dataclasses import replace

from django.conf import settings

from apps.core.commands import GradelocCommand
from apps.core.exceptions import ModelValidityWarning
from apps.geometry.oracles import monte_carlo_analytical_mae, theoretical_mae
from apps.metrics.export import schema_version, write_json, write_sweep_csv
from apps.metrics.report import compare_theory, compute_metrics
from apps.simulation.engine import run_scenario
from apps.simulation.loader import load_scenario
from apps.simulation.scenario import rescaled


class Command(GradelocCommand):
    help = 'Compare the closed-form coarse error with its Monte Carlo oracle and a simulated CG NTL.'

    def add_arguments(self, parser):
        parser.add_argument('--L', type=float, nargs='+', default=[75.0], dest='cell_sides', help='Cell sides in meters')
        parser.add_argument('--R', type=float, dest='range_m', help='NTL range (default: L*sqrt(5)/2 for each L)')
        parser.add_argument('--samples', type=int, default=10 ** 6, help='Monte Carlo samples, at least 10^5')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--scenario', default=settings.GRADELOC['DEFAULT_SCENARIO'])
        parser.add_argument('--sim-samples', type=int, help='Simulated seconds per cell side')
        parser.add_argument('--label', default='CG', help='Coarse-grained NTL to simulate')
        parser.add_argument('--skip-simulation', action='store_true')
        parser.add_argument('--output', help='Directory for verify-theory.csv and .json')
        parser.add_argument('--format', choices=('text', 'json'), default='text')

    def handle_command(self, *args, **options):
        base = None
        if not options['skip_simulation']:
            base = load_scenario(options['scenario'], seed=options['seed'])
            if options['sim_samples']:
                base = replace(base, duration=options['sim_samples'])

        rows = []
        for cell_side in options['cell_sides']:
            range_m = options['range_m'] if options['range_m'] is not None else cell_side * math.sqrt(5) / 2
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', ModelValidityWarning)
                theory = theoretical_mae(cell_side, range_m)
                estimate = monte_carlo_analytical_mae(cell_side, range_m, options['samples'], options['seed'])
            row = {
                'L_m': cell_side,
                'R_m': range_m,
                'theory_mae_m': theory,
                'theory_over_L': theory / cell_side,
                'monte_carlo_mae_m': estimate,
                'monte_carlo_delta': (estimate - theory) / theory,
                'simulated_mae_m': None,
                'simulated_delta': None,
                'simulated_vs_monte_carlo_delta': None,
            }
            if base is not None:
                scenario = rescaled(base, cell_side, range_m, labels=[options['label']])
                report = compute_metrics(run_scenario(scenario), options['label'])
                comparison = compare_theory(report.mae, cell_side, range_m)
                row['simulated_mae_m'] = report.mae
                row['simulated_delta'] = comparison.relative_delta
                row['simulated_vs_monte_carlo_delta'] = (report.mae - estimate) / estimate
            rows.append(row)

        if options['output']:
            directory = options['output']
            write_sweep_csv(rows, f'{directory}/verify-theory.csv')
            write_json(f'{directory}/verify-theory.json', {'schema_version': schema_version(), 'rows': rows})

        if options['format'] == 'json':
            self.write_json({'schema_version': schema_version(), 'rows': rows})
            return
        self.stdout.write(f'{"L":>8}{"R":>9}{"theory":>9}{"MAE/L":>8}{"MC":>9}{"dMC":>8}{"sim":>9}{"dsim":>8}{"dsimMC":>8}')
        for row in rows:
            simulated = ''
            if row['simulated_mae_m'] is not None:
                simulated = (
                    f'{row["simulated_mae_m"]:>9.2f}{row["simulated_delta"]:>8.3f}'
                    f'{row["simulated_vs_monte_carlo_delta"]:>8.3f}'
                )
            self.stdout.write(
                f'{row["L_m"]:>8.1f}{row["R_m"]:>9.2f}{row["theory_mae_m"]:>9.2f}{row["theory_over_L"]:>8.4f}'
                f'{row["monte_carlo_mae_m"]:>9.2f}{row["monte_carlo_delta"]:>8.3f}{simulated}'
            )
