"""
Stored results of simulate and sweep runs.
"""
from django.db import models


class SimulationRun(models.Model):
    """
    One replicate of a scenario
    scenario_name - name of the scenario that was run
    master_seed - seed given to the run (replicates derive theirs from it)
    replicate - replicate index, 0 for a plain run
    trace_sha256 - digest of the trace CSV bytes
    duration_s - simulated seconds
    episodes - walks started during the run
    created_at - when the run was stored
    """
    scenario_name = models.CharField(max_length=100, db_index=True, verbose_name="Scenario")
    master_seed = models.BigIntegerField(verbose_name="Master seed")
    replicate = models.PositiveIntegerField(default=0, verbose_name="Replicate")
    trace_sha256 = models.CharField(max_length=64, verbose_name="Trace digest")
    duration_s = models.PositiveIntegerField(verbose_name="Duration, s")
    episodes = models.PositiveIntegerField(default=1, verbose_name="Episodes")
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Created at")

    def __str__(self):
        return f'{self.scenario_name} seed={self.master_seed} #{self.replicate}'

    class Meta:
        verbose_name = "Simulation run"
        verbose_name_plural = "Simulation runs"
        ordering = ['-created_at']


class NtlReport(models.Model):
    """
    Error statistics of one NTL within a run
    run - run the NTL was simulated in
    label - NTL label from the scenario
    n_samples, warmup - samples with and without an estimate
    cle, mae, rmse - error statistics in meters
    within_bound - error index -> fraction within its bound
    index_histogram - error index -> sample count
    fgl_count, fgl_unavailable - fired and skipped fine fixes
    """
    run = models.ForeignKey(SimulationRun, on_delete=models.CASCADE, related_name='reports', verbose_name="Run")
    label = models.CharField(max_length=64, verbose_name="NTL label")
    n_samples = models.PositiveIntegerField(verbose_name="Samples")
    warmup = models.PositiveIntegerField(default=0, verbose_name="Warm-up samples")
    cle = models.FloatField(verbose_name="CLE, m")
    mae = models.FloatField(verbose_name="MAE, m")
    rmse = models.FloatField(verbose_name="RMSE, m")
    within_bound = models.JSONField(default=dict, verbose_name="Within bound", help_text="Error index -> fraction")
    index_histogram = models.JSONField(default=dict, verbose_name="Error index histogram")
    fgl_count = models.PositiveIntegerField(default=0, verbose_name="Fine fixes")
    fgl_unavailable = models.PositiveIntegerField(default=0, verbose_name="Unavailable fine fixes")

    def __str__(self):
        return f'{self.label}: MAE {self.mae:.2f} m'

    class Meta:
        verbose_name = "NTL report"
        verbose_name_plural = "NTL reports"
        constraints = [
            models.UniqueConstraint(fields=['run', 'label'], name='unique_report_per_run_label'),
        ]
