"""
Abstract beacon reception models.

Every decision consumes exactly one uniform draw from the caller's rng, so a
reception lane stays aligned across models and distances.
"""
from dataclasses import dataclass

from apps.core.exceptions import ConfigurationError, DomainError
from apps.geometry.grid import RANGE_TOLERANCE


@dataclass(frozen=True)
class IdealDisk:
    """Beacon received iff the sender is within range_m."""
    range_m: float
    name = 'ideal_disk'

    def __post_init__(self):
        if not self.range_m > 0:
            raise ConfigurationError('must be positive', field='range_m')

    def probability(self, distance):
        return 1.0 if distance <= self.range_m + RANGE_TOLERANCE else 0.0

    def decide(self, distance, draw):
        return distance <= self.range_m + RANGE_TOLERANCE


@dataclass(frozen=True)
class BernoulliDisk:
    """Disk reception with an independent loss probability per beacon."""
    range_m: float
    loss_prob: float
    name = 'bernoulli_disk'

    def __post_init__(self):
        if not self.range_m > 0:
            raise ConfigurationError('must be positive', field='range_m')
        if not 0 <= self.loss_prob < 1:
            raise ConfigurationError('must lie in [0, 1)', field='loss_prob')

    def probability(self, distance):
        return 1.0 - self.loss_prob if distance <= self.range_m + RANGE_TOLERANCE else 0.0

    def decide(self, distance, draw):
        return distance <= self.range_m + RANGE_TOLERANCE and draw >= self.loss_prob


@dataclass(frozen=True)
class DistanceDecay:
    """
    Certain reception up to reliable_radius_m, then a linear fall to zero
    at range_m.
    """
    reliable_radius_m: float
    range_m: float
    name = 'distance_decay'

    def __post_init__(self):
        if not 0 < self.reliable_radius_m <= self.range_m:
            raise ConfigurationError('must satisfy 0 < reliable_radius_m <= range_m', field='reliable_radius_m')

    def probability(self, distance):
        if distance <= self.reliable_radius_m:
            return 1.0
        if distance >= self.range_m:
            return 0.0
        return (self.range_m - distance) / (self.range_m - self.reliable_radius_m)

    def decide(self, distance, draw):
        return draw < self.probability(distance)


RECEPTION_MODELS = {model.name: model for model in (IdealDisk, BernoulliDisk, DistanceDecay)}


def reception_decision(distance, model, rng):
    if distance < 0:
        raise DomainError('distance must be non-negative')
    return model.decide(distance, rng.random())
