from dataclasses import dataclass, field, replace

from apps.core.exceptions import ConfigurationError
from apps.core.rng import derive_seed
from apps.geometry.grid import GridConfig
from apps.geometry.planner import derive_timing
from apps.localization.tdoa import TdoaErrorModel
from apps.mobility.sensors import ERROR_FREE, SensorErrorModel
from apps.mobility.walk import FieldBounds
from apps.radio.reception import BernoulliDisk, DistanceDecay, IdealDisk


@dataclass(frozen=True)
class Scenario:
    """
    One fully specified simulation.

    name - scenario name used in output files and stored runs
    grid - REFN0 lattice
    reception - beacon reception model
    timing - beacon and centroid timing
    profiles - NTLs co-simulated on the same walk and beacon stream
    mobility - walker configuration
    ntl_range - range used to check TDOA anchor geometry, meters
    duration - simulated seconds, one sample per NTL per second
    sensors - step sensors of self-localizing NTLs without their own
    profile_sensors - (label, SensorErrorModel) overrides
    tdoa - fine fix error model
    master_seed - root of every rng lane of the run
    random_phases - offset each node's beacons by a seeded phase
    """
    name: str
    grid: object
    reception: object
    timing: object
    profiles: tuple
    mobility: object
    ntl_range: float
    duration: int
    sensors: SensorErrorModel = ERROR_FREE
    profile_sensors: tuple = ()
    tdoa: TdoaErrorModel = field(default_factory=lambda: TdoaErrorModel.preset('fang'))
    master_seed: int = 0
    random_phases: bool = True

    def __post_init__(self):
        if not self.profiles:
            raise ConfigurationError('at least one NTL profile is required', field='profiles')
        labels = [profile.label for profile in self.profiles]
        if len(set(labels)) != len(labels):
            raise ConfigurationError('labels must be unique', field='profiles')
        unknown = {label for label, _ in self.profile_sensors} - set(labels)
        if unknown:
            raise ConfigurationError(f'sensors given for unknown profiles {sorted(unknown)}', field='profiles')

        timing = self.timing
        if abs(timing.max_beacons * timing.beacon_interval - timing.centroid_interval) > 1e-9:
            raise ConfigurationError('max_beacons * p must equal P', field='timing')
        if timing.centroid_interval != int(timing.centroid_interval):
            raise ConfigurationError('centroid interval must be a whole number of seconds', field='timing')
        if round(timing.beacon_interval * 1000) < 1:
            raise ConfigurationError('beacon interval must be at least 1 ms', field='timing')
        for profile in self.profiles:
            if (profile.max_beacons, profile.centroid_interval) != (timing.max_beacons, timing.centroid_interval):
                raise ConfigurationError('profile timing differs from scenario timing', field=profile.label)
        if self.duration <= timing.centroid_interval:
            raise ConfigurationError('must exceed the centroid interval', field='duration')
        if not self.ntl_range > 0:
            raise ConfigurationError('must be positive', field='ntl_range')
        if self.master_seed < 0:
            raise ConfigurationError('must be non-negative', field='master_seed')

    def sensors_for(self, label):
        return dict(self.profile_sensors).get(label, self.sensors)

    def profile(self, label):
        for profile in self.profiles:
            if profile.label == label:
                return profile
        raise KeyError(label)

    @property
    def labels(self):
        return [profile.label for profile in self.profiles]


def replicate_scenario(scenario, index):
    """Replicate 0 is the scenario itself; replicate k runs on a derived seed."""
    if index < 0:
        raise ConfigurationError('must be non-negative', field='replicate')
    if index == 0:
        return scenario
    return replace(scenario, master_seed=derive_seed(scenario.master_seed, f'replicate/{index}'))


def rescaled(scenario, cell_side, range_m, labels=None):
    """
    The same scenario on a grid with a different cell side. Reception radii
    scale with the range, timing is re-derived for the new cell and only the
    profiles named in ``labels`` are kept.
    """
    grid = GridConfig(rows=scenario.grid.rows, cols=scenario.grid.cols, cell_side=cell_side, origin=scenario.grid.origin)
    reception = scenario.reception
    factor = range_m / reception.range_m
    if isinstance(reception, DistanceDecay):
        reception = DistanceDecay(min(reception.reliable_radius_m * factor, range_m), range_m)
    elif isinstance(reception, BernoulliDisk):
        reception = BernoulliDisk(range_m, reception.loss_prob)
    else:
        reception = IdealDisk(range_m)

    base = scenario.timing
    timing = derive_timing(cell_side, base.speed, base.granularity, base.threshold)
    profiles = tuple(
        replace(profile, max_beacons=timing.max_beacons, centroid_interval=timing.centroid_interval)
        for profile in scenario.profiles
        if labels is None or profile.label in labels
    )
    if not profiles:
        raise ConfigurationError(f'scenario has none of the profiles {list(labels)}', field='profiles')
    kept = {profile.label for profile in profiles}
    return replace(
        scenario,
        grid=grid,
        reception=reception,
        timing=timing,
        profiles=profiles,
        profile_sensors=tuple(pair for pair in scenario.profile_sensors if pair[0] in kept),
        mobility=replace(scenario.mobility, field=FieldBounds.for_grid(grid)),
        ntl_range=range_m,
        duration=max(scenario.duration, int(timing.centroid_interval) + 1),
    )
