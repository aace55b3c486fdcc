import math
from dataclasses import dataclass

from apps.core.exceptions import ConfigurationError
from .walk import Direction


@dataclass(frozen=True)
class SensorErrorModel:
    """
    stride_accuracy - SA, reported stride as a fraction of the actual stride
    detect_accuracy - DA, probability that a step is detected
    heading_error_deg - GA, fixed heading bias towards the other axis, degrees
    """
    stride_accuracy: float = 1.0
    detect_accuracy: float = 1.0
    heading_error_deg: float = 0.0

    def __post_init__(self):
        if not 0 < self.stride_accuracy <= 1:
            raise ConfigurationError('must lie in (0, 1]', field='stride_accuracy')
        if not 0 < self.detect_accuracy <= 1:
            raise ConfigurationError('must lie in (0, 1]', field='detect_accuracy')
        if self.heading_error_deg < 0:
            raise ConfigurationError('must be non-negative', field='heading_error_deg')


ERROR_FREE = SensorErrorModel()


@dataclass(frozen=True)
class SensedStep:
    detected: bool
    reported_stride: float
    reported_heading: float

    @property
    def displacement(self):
        if not self.detected:
            return 0.0, 0.0
        return (
            self.reported_stride * math.cos(self.reported_heading),
            self.reported_stride * math.sin(self.reported_heading),
        )


def sense_step(event, err, rng):
    """
    What the walker's own sensors report for one actual step. A rightward
    step is reported rotated downwards by GA, a downward step rotated to the
    right by GA.
    """
    detected = bool(rng.random() < err.detect_accuracy)
    bias = math.radians(err.heading_error_deg)
    if event.direction is Direction.RIGHT:
        heading = event.direction.heading + bias
    else:
        heading = event.direction.heading - bias
    return SensedStep(
        detected=detected,
        reported_stride=err.stride_accuracy * event.stride,
        reported_heading=heading,
    )
