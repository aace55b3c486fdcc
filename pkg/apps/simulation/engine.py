"""
Discrete-event run of one scenario on a simpy clock in integer milliseconds.

Within one instant, beacons are handled first, then the walker steps, then
every NTL records a sample, then (on multiples of P) every NTL runs its
centroid update. Beacon events carry simpy's urgent priority so they always
precede the once-per-second clock event scheduled for the same instant.

Random lanes: ``beacon-phase``, ``walk``, ``reception/<node>``,
``sensors/<label>`` and ``tdoa/<label>``.
"""
import logging
from concurrent.futures import ProcessPoolExecutor

import simpy
from simpy.events import URGENT

from apps.core.exceptions import ConfigurationError
from apps.core.rng import RngLanes
from apps.geometry.grid import grid_positions
from apps.localization.profiles import NtlState
from apps.localization.state_machine import current_estimate, dead_reckon_accumulate, ntl_update
from apps.mobility.sensors import sense_step
from apps.mobility.walk import advance_walk, start_walk
from apps.radio.beacons import beacon_schedule, random_phases, to_ms, window_tally
from apps.radio.reception import reception_decision
from .scenario import replicate_scenario
from .trace import Trace, TraceSample

logger = logging.getLogger(__name__)

TICK_MS = 1000


class BeaconTimeout(simpy.events.Event):
    """A timeout that fires before normal events scheduled for the same instant."""

    def __init__(self, env, delay):
        super().__init__(env)
        self._ok = True
        self._value = None
        self._delay = delay
        env.schedule(self, URGENT, delay)


class ScenarioRun:
    def __init__(self, scenario):
        self.scenario = scenario
        self.lanes = RngLanes(scenario.master_seed)
        self.positions = grid_positions(scenario.grid)
        self.centroid_ms = to_ms(scenario.timing.centroid_interval)
        self.env = simpy.Environment()
        self.walk = start_walk(scenario.mobility, self.lanes['walk'])
        self.states = {profile.label: NtlState() for profile in scenario.profiles}
        self.receptions = []
        self.trace = Trace(scenario_name=scenario.name, master_seed=scenario.master_seed)

    def beacons(self):
        scenario = self.scenario
        interval = scenario.timing.beacon_interval
        phases = None
        if scenario.random_phases:
            phases = random_phases(scenario.grid.node_count, interval, self.lanes['beacon-phase'])
        for beacon in beacon_schedule(scenario.grid, interval, phases, until=scenario.duration):
            yield BeaconTimeout(self.env, beacon.emit_time_ms - self.env.now)
            distance = self.walk.actual_pos.distance_to(beacon.source_pos)
            if reception_decision(distance, scenario.reception, self.lanes[f'reception/{beacon.source_id}']):
                self.receptions.append((beacon.emit_time, beacon.source_id))

    def clock(self):
        for second in range(1, self.scenario.duration + 1):
            yield self.env.timeout(TICK_MS)
            self.tick(second)

    def tick(self, second):
        scenario = self.scenario
        self.walk, event = advance_walk(self.walk, scenario.mobility, self.lanes['walk'])
        for profile in scenario.profiles:
            if profile.self_localize:
                label = profile.label
                sensed = sense_step(event, scenario.sensors_for(label), self.lanes[f'sensors/{label}'])
                self.states[label] = dead_reckon_accumulate(self.states[label], sensed, profile)

        actual = self.walk.actual_pos
        for profile in scenario.profiles:
            estimate = current_estimate(self.states[profile.label], profile, second)
            self.trace.samples.append(TraceSample(second, profile.label, actual, estimate))

        if (second * TICK_MS) % self.centroid_ms == 0:
            self.update_ntls(second, actual)

        if self.walk.episode_done:
            self.redeploy(second)

    def update_ntls(self, second, actual):
        scenario = self.scenario
        window = scenario.timing.centroid_interval
        tally = window_tally(self.receptions, second - window, window)
        for profile in scenario.profiles:
            label = profile.label
            before = self.states[label]
            state, _, fired = ntl_update(
                before,
                tally,
                actual,
                profile,
                scenario.tdoa,
                self.lanes[f'tdoa/{label}'],
                second,
                self.positions,
                ntl_range=scenario.ntl_range,
                cell_side=scenario.grid.cell_side,
            )
            if fired:
                self.trace.fgl_events.append((second, label))
            if state.fgl_unavailable > before.fgl_unavailable:
                self.trace.unavailable_events.append((second, label))
            self.states[label] = state
        self.receptions = [reception for reception in self.receptions if reception[0] >= second]

    def redeploy(self, second):
        logger.debug('%s: episode %s finished at %s s', self.scenario.name, self.walk.episode, second)
        self.walk = start_walk(self.scenario.mobility, self.lanes['walk'], episode=self.walk.episode + 1)
        self.states = {label: state.redeployed() for label, state in self.states.items()}
        self.receptions = []
        self.trace.episodes += 1

    def run(self):
        self.env.process(self.beacons())
        self.env.process(self.clock())
        self.env.run(until=self.scenario.duration * TICK_MS + 1)
        return self.trace


def run_scenario(scenario):
    logger.info('Running %s with seed %s for %s s', scenario.name, scenario.master_seed, scenario.duration)
    trace = ScenarioRun(scenario).run()
    logger.info('%s: %s samples, %s fine fixes', scenario.name, len(trace.samples), len(trace.fgl_events))
    return trace


def run_replicates(scenario, n_replicates, workers=1):
    """Run replicates 0..n-1, in worker processes when ``workers`` > 1."""
    if n_replicates < 1:
        raise ConfigurationError('must be at least 1', field='replicates')
    scenarios = [replicate_scenario(scenario, index) for index in range(n_replicates)]
    if workers <= 1 or n_replicates == 1:
        return [run_scenario(replicate) for replicate in scenarios]
    with ProcessPoolExecutor(max_workers=min(workers, n_replicates)) as executor:
        return list(executor.map(run_scenario, scenarios))
