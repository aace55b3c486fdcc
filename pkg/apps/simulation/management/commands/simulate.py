from apps.core.commands import GradelocCommand
from apps.core.exceptions import EmptyTraceError, UndefinedOverhead
from apps.metrics.export import run_payload, write_json, write_trace_csv
from apps.metrics.report import compute_metrics, fgl_overhead
from apps.simulation.engine import run_scenario
from apps.simulation.storage import store_run
from ._options import add_scenario_arguments, output_dir, scenario_from_options


class Command(GradelocCommand):
    help = 'Run one scenario and write its trace CSV and per-NTL metrics JSON.'

    def add_arguments(self, parser):
        add_scenario_arguments(parser)
        parser.add_argument('--baseline', default='FG', help='NTL label fine-fix overhead is measured against')

    def handle_command(self, *args, **options):
        scenario = scenario_from_options(options)
        trace = run_scenario(scenario)

        reports = []
        for label in scenario.labels:
            try:
                reports.append(compute_metrics(trace, label))
            except EmptyTraceError as exc:
                self.stdout.write(self.style.WARNING(str(exc)))
        baseline = next((report for report in reports if report.label == options['baseline']), None)
        if baseline is not None:
            for report in reports:
                if scenario.profile(report.label).fine_grained and report is not baseline:
                    try:
                        report.fgl_overhead_vs_baseline = fgl_overhead(report, baseline)
                    except UndefinedOverhead:
                        pass

        stem = f'{scenario.name}-seed{scenario.master_seed}'
        directory = output_dir(options)
        digest = write_trace_csv(trace, directory / f'{stem}-trace.csv')
        write_json(directory / f'{stem}-report.json', run_payload(scenario, trace, reports, digest))
        if not options['no_store']:
            store_run(scenario.name, scenario.master_seed, 0, trace, digest, reports)

        self.stdout.write(f'{"NTL":<16}{"MAE":>8}{"RMSE":>8}{"<=10m":>8}{"FGL":>7}')
        for report in reports:
            self.stdout.write(
                f'{report.label:<16}{report.mae:>8.2f}{report.rmse:>8.2f}{report.within_10m:>8.3f}{report.fgl_count:>7}'
            )
        self.stdout.write(self.style.SUCCESS(f'Trace {digest[:12]} written to {directory}'))
