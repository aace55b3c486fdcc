from django.contrib import admin
from .models import SimulationRun, NtlReport


class NtlReportInline(admin.TabularInline):
    model = NtlReport
    extra = 0
    readonly_fields = ['label', 'n_samples', 'warmup', 'mae', 'rmse', 'fgl_count', 'fgl_unavailable']
    fields = readonly_fields


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ['scenario_name', 'master_seed', 'replicate', 'duration_s', 'created_at']
    list_filter = ['scenario_name']
    search_fields = ['scenario_name', 'trace_sha256']
    inlines = [NtlReportInline]


admin.site.register(NtlReport)
