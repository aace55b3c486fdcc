from rest_framework import serializers

from apps.simulation.models import NtlReport, SimulationRun


class NtlReportSerializer(serializers.ModelSerializer):
    class Meta:
        model = NtlReport
        fields = [
            'label', 'n_samples', 'warmup', 'cle', 'mae', 'rmse',
            'within_bound', 'index_histogram', 'fgl_count', 'fgl_unavailable',
        ]


class SimulationRunSerializer(serializers.ModelSerializer):
    reports = NtlReportSerializer(many=True, read_only=True)

    class Meta:
        model = SimulationRun
        fields = [
            'id', 'scenario_name', 'master_seed', 'replicate', 'trace_sha256',
            'duration_s', 'episodes', 'created_at', 'reports',
        ]


class PlanQuerySerializer(serializers.Serializer):
    """Query string of the planning endpoint; names follow the plan command flags."""
    L = serializers.FloatField()
    S = serializers.FloatField(default=1.0)
    G = serializers.FloatField(default=0.1)
    T = serializers.FloatField(default=0.9)
    R = serializers.FloatField(required=False)
    fine_cnt_limit = serializers.IntegerField(min_value=1, default=4)
    rows = serializers.IntegerField(min_value=2, default=5)
    cols = serializers.IntegerField(min_value=2, default=5)
