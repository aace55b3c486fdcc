import enum
import math
from dataclasses import dataclass, replace

from apps.core.exceptions import ConfigurationError


class Method(enum.Enum):
    COARSE = 'coarse'
    FINE = 'fine'
    DEAD_RECKONED = 'dead_reckoned'
    NONE = 'none'


@dataclass(frozen=True)
class NtlProfile:
    """
    Behaviour of one simulated NTL.

    label - name of the NTL in traces and reports
    coarse_grained - reports the beacon centroid while no fine fix exists
    fine_grained - requests TDOA fixes from the grid
    self_localize - integrates its own step sensors between fixes
    fine_cnt_limit - unchanged centroid windows that force a fix
    threshold - T, fraction of max_beacons needed to become a candidate
    max_beacons - beacons per node per centroid window
    centroid_interval - P, seconds
    """
    label: str
    coarse_grained: bool
    fine_grained: bool
    self_localize: bool
    fine_cnt_limit: int
    threshold: float
    max_beacons: int
    centroid_interval: float

    def __post_init__(self):
        if not self.label:
            raise ConfigurationError('must not be empty', field='label')
        if self.self_localize and not self.fine_grained:
            raise ConfigurationError('self_localize requires fine_grained', field=f'{self.label}.self_localize')
        if self.fine_cnt_limit < 1:
            raise ConfigurationError('must be at least 1', field=f'{self.label}.fine_cnt_limit')
        if not 0 < self.threshold <= 1:
            raise ConfigurationError('must lie in (0, 1]', field=f'{self.label}.threshold')
        if self.max_beacons < 1:
            raise ConfigurationError('must be at least 1', field=f'{self.label}.max_beacons')

    @property
    def kind(self):
        if self.self_localize:
            return 'EFG'
        if self.fine_grained:
            return 'FG'
        if self.coarse_grained:
            return 'CG'
        return 'none'

    @property
    def candidate_threshold_count(self):
        return math.ceil(self.threshold * self.max_beacons - 1e-9)


@dataclass(frozen=True)
class LocationEstimate:
    pos: object
    method: Method
    time: float

    @property
    def available(self):
        return self.method is not Method.NONE


@dataclass(frozen=True)
class NtlState:
    """
    last_candidates - node ids behind the last non-empty candidate set
    last_centroid - centroid of last_candidates
    unchanged_count - centroid windows since the candidate set last changed or a fix fired
    last_fix - position of the last fine-grained fix
    fix_time - when last_fix was taken
    dead_reckon_offset - sensed displacement accumulated since last_fix
    steps_since_fix - sensed steps folded into dead_reckon_offset
    fgl_count - fine-grained localizations fired
    fgl_unavailable - fixes that were due but lacked anchor geometry
    """
    last_candidates: tuple = None
    last_centroid: object = None
    unchanged_count: int = 0
    last_fix: object = None
    fix_time: float = None
    dead_reckon_offset: tuple = (0.0, 0.0)
    steps_since_fix: int = 0
    fgl_count: int = 0
    fgl_unavailable: int = 0

    def redeployed(self):
        """Fresh localization state that keeps the counters."""
        return NtlState(fgl_count=self.fgl_count, fgl_unavailable=self.fgl_unavailable)

    def with_fix(self, fix, now):
        return replace(
            self,
            last_fix=fix,
            fix_time=now,
            unchanged_count=0,
            dead_reckon_offset=(0.0, 0.0),
            steps_since_fix=0,
            fgl_count=self.fgl_count + 1,
        )
