"""
Stochastic stand-in for a TDOA position solver: the fix is the true
position displaced by independent bounded errors on each axis.
"""
from dataclasses import dataclass

from apps.core.exceptions import ConfigurationError, ContractViolation, FineLocalizationUnavailable
from apps.geometry.grid import anchors_in_range, has_non_collinear_triple

# Per-axis error bounds in meters of the supported solver presets.
PRESETS = {
    'fang': (1.0, 5.0),
    'taylor': (1.0, 5.5),
}


@dataclass(frozen=True)
class TdoaErrorModel:
    qmin: float
    qmax: float

    def __post_init__(self):
        if not 0 <= self.qmin <= self.qmax:
            raise ConfigurationError('must satisfy 0 <= qmin <= qmax', field='qmin')

    @classmethod
    def preset(cls, name):
        try:
            qmin, qmax = PRESETS[name]
        except KeyError:
            raise ConfigurationError(f'unknown preset {name!r}, expected one of {sorted(PRESETS)}', field='preset') from None
        return cls(qmin, qmax)


def fix_geometry_available(actual, anchors, ntl_range, cell_side):
    # collinearity is judged on the cell scale, not the radio range
    return has_non_collinear_triple(anchors_in_range(actual, anchors, ntl_range), cell_side)


def tdoa_fix(actual, model, rng, anchors=None, ntl_range=None, cell_side=None):
    """
    Fine position fix for an NTL at ``actual``. When ``anchors`` are given,
    at least three of them must be non-collinear and within ``ntl_range``
    on a grid of ``cell_side`` cells.
    """
    if anchors is not None:
        if ntl_range is None or cell_side is None:
            raise ContractViolation('anchor geometry needs both ntl_range and cell_side')
        if not fix_geometry_available(actual, anchors, ntl_range, cell_side):
            raise FineLocalizationUnavailable(
                f'fewer than three non-collinear anchors within {ntl_range} m of ({actual.x:.2f}, {actual.y:.2f})'
            )
    ex, ey = rng.uniform(model.qmin, model.qmax, size=2)
    sx, sy = rng.choice((-1.0, 1.0), size=2)
    return actual.translated(float(sx * ex), float(sy * ey))
