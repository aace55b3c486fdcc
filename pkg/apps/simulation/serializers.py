"""
Scenario file schema. Every section rejects keys it does not declare.
"""
from collections.abc import Mapping

from django.conf import settings
from rest_framework import serializers

from apps.core.exceptions import GradelocError
from apps.geometry.grid import GridConfig, Point2D
from apps.geometry.planner import TimingPlan, derive_timing
from apps.localization.profiles import NtlProfile
from apps.localization.tdoa import PRESETS, TdoaErrorModel
from apps.mobility.sensors import ERROR_FREE, SensorErrorModel
from apps.mobility.walk import FieldBounds, MobilityConfig
from apps.radio.reception import RECEPTION_MODELS, BernoulliDisk, DistanceDecay, IdealDisk
from .scenario import Scenario


class StrictSerializer(serializers.Serializer):
    def to_internal_value(self, data):
        if isinstance(data, Mapping):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ['Unknown field.'] for key in unknown})
        return super().to_internal_value(data)


def build(factory, *args, **kwargs):
    """Construct a domain object, turning its validation errors into serializer errors."""
    try:
        return factory(*args, **kwargs)
    except GradelocError as exc:
        raise serializers.ValidationError(str(exc))


class PointSerializer(StrictSerializer):
    x = serializers.FloatField()
    y = serializers.FloatField()


class GridSerializer(StrictSerializer):
    rows = serializers.IntegerField(min_value=2)
    cols = serializers.IntegerField(min_value=2)
    cell_side_m = serializers.FloatField()
    origin = PointSerializer(required=False)

    def validate(self, attrs):
        origin = attrs.get('origin', {'x': 0.0, 'y': 0.0})
        return build(
            GridConfig,
            rows=attrs['rows'],
            cols=attrs['cols'],
            cell_side=attrs['cell_side_m'],
            origin=build(Point2D, origin['x'], origin['y']),
        )


class ReceptionSerializer(StrictSerializer):
    model = serializers.ChoiceField(choices=sorted(RECEPTION_MODELS))
    range_m = serializers.FloatField()
    loss_prob = serializers.FloatField(required=False)
    reliable_radius_m = serializers.FloatField(required=False)

    def validate(self, attrs):
        model = attrs['model']
        if model == IdealDisk.name:
            return build(IdealDisk, attrs['range_m'])
        if model == BernoulliDisk.name:
            if 'loss_prob' not in attrs:
                raise serializers.ValidationError({'loss_prob': ['This field is required for bernoulli_disk.']})
            return build(BernoulliDisk, attrs['range_m'], attrs['loss_prob'])
        if 'reliable_radius_m' not in attrs:
            raise serializers.ValidationError({'reliable_radius_m': ['This field is required for distance_decay.']})
        return build(DistanceDecay, attrs['reliable_radius_m'], attrs['range_m'])


class TimingSerializer(StrictSerializer):
    """Either a target granularity to derive p and P from, or both intervals."""
    speed_mps = serializers.FloatField()
    threshold = serializers.FloatField()
    granularity = serializers.FloatField(required=False)
    centroid_interval_s = serializers.FloatField(required=False)
    beacon_interval_s = serializers.FloatField(required=False)

    def validate(self, attrs):
        explicit = 'centroid_interval_s' in attrs or 'beacon_interval_s' in attrs
        if explicit:
            if not ('centroid_interval_s' in attrs and 'beacon_interval_s' in attrs):
                raise serializers.ValidationError('centroid_interval_s and beacon_interval_s go together.')
            return build(
                TimingPlan.from_intervals,
                attrs['centroid_interval_s'],
                attrs['beacon_interval_s'],
                attrs['threshold'],
                speed=attrs['speed_mps'],
            )
        if 'granularity' not in attrs:
            raise serializers.ValidationError({'granularity': ['Give a granularity or both intervals.']})
        return attrs


class MobilitySerializer(StrictSerializer):
    stride_min_m = serializers.FloatField()
    stride_max_m = serializers.FloatField()
    segment_steps = serializers.IntegerField(min_value=1)
    steps_per_second = serializers.IntegerField(default=1)


class SensorSerializer(StrictSerializer):
    stride_accuracy = serializers.FloatField()
    detect_accuracy = serializers.FloatField()
    heading_error_deg = serializers.FloatField()

    def validate(self, attrs):
        return build(SensorErrorModel, **attrs)


class TdoaSerializer(StrictSerializer):
    preset = serializers.ChoiceField(choices=sorted(PRESETS), required=False)
    qmin_m = serializers.FloatField(required=False)
    qmax_m = serializers.FloatField(required=False)

    def validate(self, attrs):
        if 'preset' in attrs:
            if 'qmin_m' in attrs or 'qmax_m' in attrs:
                raise serializers.ValidationError('Give either a preset or qmin_m and qmax_m.')
            return TdoaErrorModel.preset(attrs['preset'])
        if not ('qmin_m' in attrs and 'qmax_m' in attrs):
            raise serializers.ValidationError('Give either a preset or qmin_m and qmax_m.')
        return build(TdoaErrorModel, attrs['qmin_m'], attrs['qmax_m'])


class ProfileSerializer(StrictSerializer):
    label = serializers.CharField(max_length=64)
    coarse_grained = serializers.BooleanField()
    fine_grained = serializers.BooleanField()
    self_localize = serializers.BooleanField()
    fine_cnt_limit = serializers.IntegerField(min_value=1)
    sensors = SensorSerializer(required=False)

    def validate(self, attrs):
        if attrs['self_localize'] and not attrs['fine_grained']:
            raise serializers.ValidationError({'self_localize': ['Requires fine_grained.']})
        return attrs


class ScenarioSerializer(StrictSerializer):
    schema_version = serializers.IntegerField()
    name = serializers.SlugField(max_length=100)
    master_seed = serializers.IntegerField(min_value=0, max_value=2 ** 63 - 1, default=0)
    target_samples = serializers.IntegerField(min_value=1)
    ntl_range_m = serializers.FloatField()
    beacon_phases = serializers.ChoiceField(choices=['random', 'zero'], default='random')
    grid = GridSerializer()
    reception = ReceptionSerializer()
    timing = TimingSerializer()
    mobility = MobilitySerializer()
    sensors = SensorSerializer(required=False)
    tdoa = TdoaSerializer()
    profiles = ProfileSerializer(many=True, allow_empty=False)

    def validate_schema_version(self, value):
        expected = settings.GRADELOC['SCHEMA_VERSION']
        if value != expected:
            raise serializers.ValidationError(f'Expected schema version {expected}.')
        return value

    def validate(self, attrs):
        grid = attrs['grid']
        timing = attrs['timing']
        if not isinstance(timing, TimingPlan):
            timing = build(derive_timing, grid.cell_side, timing['speed_mps'], timing['granularity'], timing['threshold'])
        mobility = attrs['mobility']
        profiles = attrs['profiles']
        attrs['scenario'] = build(
            Scenario,
            name=attrs['name'],
            grid=grid,
            reception=attrs['reception'],
            timing=timing,
            profiles=tuple(
                build(
                    NtlProfile,
                    label=profile['label'],
                    coarse_grained=profile['coarse_grained'],
                    fine_grained=profile['fine_grained'],
                    self_localize=profile['self_localize'],
                    fine_cnt_limit=profile['fine_cnt_limit'],
                    threshold=timing.threshold,
                    max_beacons=timing.max_beacons,
                    centroid_interval=timing.centroid_interval,
                )
                for profile in profiles
            ),
            mobility=build(
                MobilityConfig,
                stride_min=mobility['stride_min_m'],
                stride_max=mobility['stride_max_m'],
                segment_steps=mobility['segment_steps'],
                field=FieldBounds.for_grid(grid),
                steps_per_second=mobility['steps_per_second'],
            ),
            ntl_range=attrs['ntl_range_m'],
            duration=attrs['target_samples'],
            sensors=attrs.get('sensors', ERROR_FREE),
            profile_sensors=tuple((p['label'], p['sensors']) for p in profiles if 'sensors' in p),
            tdoa=attrs['tdoa'],
            master_seed=attrs['master_seed'],
            random_phases=attrs['beacon_phases'] == 'random',
        )
        return attrs
