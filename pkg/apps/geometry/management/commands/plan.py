from apps.core.commands import GradelocCommand
from apps.geometry.planner import build_plan


class Command(GradelocCommand):
    help = 'Derive NTL range, centroid timing, fineCntLimit bound and expected coarse error for a grid.'

    def add_arguments(self, parser):
        parser.add_argument('--L', type=float, required=True, dest='cell_side', help='Grid cell side in meters')
        parser.add_argument('--S', type=float, required=True, dest='speed', help='NTL speed in m/s')
        parser.add_argument('--G', type=float, required=True, dest='granularity', help='Target granularity p/P')
        parser.add_argument('--T', type=float, required=True, dest='threshold', help='Candidate threshold in (0, 1]')
        parser.add_argument('--R', type=float, dest='range_m', help='NTL range in meters (default: L*sqrt(5)/2)')
        parser.add_argument('--fine-cnt-limit', type=int, default=4, help='fineCntLimit to check against its bound')
        parser.add_argument('--rows', type=int, default=5)
        parser.add_argument('--cols', type=int, default=5)
        parser.add_argument('--format', choices=('text', 'json'), default='text')

    def handle_command(self, *args, **options):
        report = build_plan(
            options['cell_side'],
            options['speed'],
            options['granularity'],
            options['threshold'],
            range_m=options['range_m'],
            fine_cnt_limit=options['fine_cnt_limit'],
            rows=options['rows'],
            cols=options['cols'],
        )
        if options['format'] == 'json':
            self.write_json(report.to_dict())
            return

        timing = report.timing
        lines = [
            f'Cell side L:            {report.cell_side:g} m',
            f'Minimum NTL range:      {report.min_range:.2f} m -> {report.rounded_range} m',
            f'Centroid interval P:    {timing.centroid_interval:g} s (raw {timing.raw_interval:.2f} s)',
            f'Beacon interval p:      {timing.beacon_interval:g} s',
            f'Granularity G:          {timing.granularity:g}',
            f'maxBeacons:             {timing.max_beacons}',
            f'Candidate threshold:    {report.candidate_threshold_count} of {timing.max_beacons} beacons',
            f'fineCntLimit:           {report.fine_cnt_limit} (bound {report.fine_cnt_limit_bound})',
        ]
        if report.theoretical_mae is not None:
            lines.append(
                f'Theoretical MAE:        {report.theoretical_mae:.1f} m '
                f'({report.theoretical_mae / report.cell_side:.4f} L) at R = {report.range_used:.2f} m'
            )
            lines.append(f'Region area fraction:   {report.region_area_fraction:.4f}')
        verdict = f'connected, max {report.max_hops} hops to gateway' if report.connected else 'disconnected'
        lines.append(f'Routing:                {verdict}')
        for line in lines:
            self.stdout.write(line)
        for note in report.notes:
            self.stdout.write(self.style.WARNING(note))
