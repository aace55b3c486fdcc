import heapq
import itertools
from collections import Counter
from dataclasses import dataclass, field

from apps.core.exceptions import ConfigurationError, ContractViolation


def to_ms(seconds):
    return int(round(seconds * 1000))


@dataclass(frozen=True)
class Beacon:
    """
    source_id - emitting REFN0 id
    source_pos - emitting node position
    emit_time_ms - virtual emission time in milliseconds
    """
    source_id: int
    source_pos: object
    emit_time_ms: int

    @property
    def emit_time(self):
        return self.emit_time_ms / 1000


@dataclass(frozen=True)
class BeaconTally:
    """
    window_start - start of the half-open window, seconds
    window_len - window length P, seconds
    counts - node id -> beacons received inside the window
    """
    window_start: float
    window_len: float
    counts: dict = field(default_factory=dict)

    @property
    def total(self):
        return sum(self.counts.values())


def random_phases(node_count, beacon_interval, rng):
    """Per-node emission offsets in whole milliseconds within [0, p), as seconds."""
    return [int(ms) / 1000 for ms in rng.integers(0, to_ms(beacon_interval), size=node_count)]


def beacon_schedule(grid, beacon_interval, phases=None, until=None):
    """
    Yield every beacon of ``grid`` in emission order, ties broken by node id.
    Node ``i`` emits at ``phases[i] + k * beacon_interval``. The stream is
    unbounded unless ``until`` (seconds, inclusive) is given.
    """
    period_ms = to_ms(beacon_interval)
    if period_ms < 1:
        raise ConfigurationError('must be at least 1 ms', field='beacon_interval')
    if phases is None:
        phases = [0.0] * grid.node_count
    if len(phases) != grid.node_count:
        raise ConfigurationError(f'expected {grid.node_count} phases, got {len(phases)}', field='phases')
    offsets = [to_ms(phase) for phase in phases]
    if any(not 0 <= offset < period_ms for offset in offsets):
        raise ConfigurationError('phases must lie in [0, p)', field='phases')

    def emissions(node_id, offset):
        for k in itertools.count():
            yield offset + k * period_ms, node_id

    stream = heapq.merge(*(emissions(node_id, offset) for node_id, offset in enumerate(offsets)))
    limit_ms = None if until is None else to_ms(until)
    for time_ms, node_id in stream:
        if limit_ms is not None and time_ms > limit_ms:
            return
        yield Beacon(source_id=node_id, source_pos=grid.node_position(node_id), emit_time_ms=time_ms)


def window_tally(receptions, window_start, window_len):
    """Count receptions per node in ``[window_start, window_start + window_len)``."""
    window_end = window_start + window_len
    counts = Counter()
    previous = None
    for time, node_id in receptions:
        if previous is not None and time < previous:
            raise ContractViolation(f'reception at {time} s follows one at {previous} s')
        previous = time
        if window_start <= time < window_end:
            counts[node_id] += 1
    return BeaconTally(window_start=window_start, window_len=window_len, counts=dict(counts))
