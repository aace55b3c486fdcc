"""
Graded-precision NTL update: beacon centroid every P seconds, a fine fix
when the candidate set changes or stays put for fineCntLimit windows, and
dead reckoning between fixes for self-localizing NTLs.
"""
import logging
from dataclasses import replace

from apps.core.exceptions import ContractViolation, FineLocalizationUnavailable, NoCandidates
from apps.geometry.grid import Point2D
from .profiles import LocationEstimate, Method
from .tdoa import tdoa_fix

logger = logging.getLogger(__name__)


def candidate_ids(tally, profile):
    need = profile.candidate_threshold_count
    return tuple(sorted(node for node, count in tally.counts.items() if count >= need))


def candidate_set(tally, profile, node_positions):
    return [node_positions[node] for node in candidate_ids(tally, profile)]


def centroid(points):
    if not points:
        raise NoCandidates('no candidate nodes passed the threshold')
    return Point2D(sum(p.x for p in points) / len(points), sum(p.y for p in points) / len(points))


def current_estimate(state, profile, now):
    """What the NTL reports at ``now`` given its state."""
    if profile.fine_grained and state.last_fix is not None:
        if not profile.self_localize:
            return LocationEstimate(state.last_fix, Method.FINE, now)
        dx, dy = state.dead_reckon_offset
        method = Method.FINE if state.steps_since_fix == 0 else Method.DEAD_RECKONED
        return LocationEstimate(state.last_fix.translated(dx, dy), method, now)
    if profile.coarse_grained and state.last_centroid is not None:
        return LocationEstimate(state.last_centroid, Method.COARSE, now)
    return LocationEstimate(None, Method.NONE, now)


def ntl_update(state, tally, actual, profile, tdoa_model, rng, now, node_positions, ntl_range=None, cell_side=None):
    """
    One centroid window for one NTL. Returns the new state, the estimate it
    reports and whether a fine-grained localization fired.

    An empty candidate set counts as unchanged and keeps the previous
    centroid. When ``ntl_range`` is given, along with the grid's
    ``cell_side``, a due fix that lacks anchor geometry is counted in
    ``fgl_unavailable`` instead of firing.
    """
    ids = candidate_ids(tally, profile)
    changed = bool(ids) and ids != state.last_candidates
    if ids:
        state = replace(
            state,
            last_candidates=ids,
            last_centroid=centroid([node_positions[node] for node in ids]),
        )

    fired = False
    if profile.fine_grained and (changed or state.unchanged_count + 1 >= profile.fine_cnt_limit):
        anchors = node_positions if ntl_range is not None else None
        try:
            fix = tdoa_fix(actual, tdoa_model, rng, anchors=anchors, ntl_range=ntl_range, cell_side=cell_side)
        except FineLocalizationUnavailable as exc:
            logger.debug('%s at %s s: %s', profile.label, now, exc)
            state = replace(
                state,
                unchanged_count=0 if changed else state.unchanged_count + 1,
                fgl_unavailable=state.fgl_unavailable + 1,
            )
        else:
            state = state.with_fix(fix, now)
            fired = True
    elif changed:
        state = replace(state, unchanged_count=0)
    else:
        state = replace(state, unchanged_count=state.unchanged_count + 1)

    return state, current_estimate(state, profile, now), fired


def dead_reckon_accumulate(state, sensed, profile):
    if not profile.self_localize:
        raise ContractViolation(f'{profile.label} does not self-localize')
    dx, dy = sensed.displacement
    ox, oy = state.dead_reckon_offset
    return replace(
        state,
        dead_reckon_offset=(ox + dx, oy + dy),
        steps_since_fix=state.steps_since_fix + 1,
    )
