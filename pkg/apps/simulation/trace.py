from dataclasses import dataclass, field


@dataclass(frozen=True)
class TraceSample:
    time: int
    label: str
    actual: object
    estimate: object

    @property
    def error(self):
        if self.estimate.pos is None:
            return None
        return self.estimate.pos.distance_to(self.actual)


@dataclass
class Trace:
    """
    Output of one run.

    samples - one TraceSample per NTL per simulated second, in time order
    fgl_events - (time, label) of every fine-grained localization
    unavailable_events - (time, label) of fixes skipped for anchor geometry
    episodes - walks completed or started during the run
    """
    scenario_name: str
    master_seed: int
    samples: list = field(default_factory=list)
    fgl_events: list = field(default_factory=list)
    unavailable_events: list = field(default_factory=list)
    episodes: int = 1

    def for_label(self, label):
        return [sample for sample in self.samples if sample.label == label]

    @property
    def labels(self):
        return list(dict.fromkeys(sample.label for sample in self.samples))
