from django.db import transaction

from .models import NtlReport, SimulationRun


@transaction.atomic
def store_run(scenario_name, master_seed, replicate, trace, digest, reports):
    run = SimulationRun.objects.create(
        scenario_name=scenario_name,
        master_seed=master_seed,
        replicate=replicate,
        trace_sha256=digest,
        duration_s=len({sample.time for sample in trace.samples}),
        episodes=trace.episodes,
    )
    NtlReport.objects.bulk_create([
        NtlReport(
            run=run,
            label=report.label,
            n_samples=report.n_samples,
            warmup=report.warmup,
            cle=report.cle,
            mae=report.mae,
            rmse=report.rmse,
            within_bound={str(k): v for k, v in report.within_bound.items()},
            index_histogram={str(k): v for k, v in report.index_histogram.items()},
            fgl_count=report.fgl_count,
            fgl_unavailable=report.fgl_unavailable,
        )
        for report in reports
    ])
    return run
