"""Spatial-cognition states of tracked objects: visibility, reach and motion.

Visibility and reach are independent axes, so an object can be occluded and
still within arm's reach.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_scalar
from .geometry import in_fov


class Visibility(str, Enum):
    IN_SIGHT = "InSight"
    OCCLUDED = "Occluded"
    OUT_OF_VIEW = "OutOfView"

    @property
    def out_of_sight(self):
        return self is not Visibility.IN_SIGHT


class Reach(str, Enum):
    IN_REACH = "InReach"
    OUT_OF_REACH = "OutOfReach"


class Motion(str, Enum):
    MOVED = "Moved"
    STATIONARY = "Stationary"


VISIBILITY_ORDER = (Visibility.IN_SIGHT, Visibility.OCCLUDED, Visibility.OUT_OF_VIEW)
REACH_ORDER = (Reach.IN_REACH, Reach.OUT_OF_REACH)


@dataclass(frozen=True)
class CognitionConfig:
    eta: float = 0.70
    epsilon: float = 0.30

    def __post_init__(self):
        check_scalar(self.eta, "eta", min_val=0.0, include_min=False)
        check_scalar(self.epsilon, "epsilon", min_val=0.0, include_min=False)


@dataclass(frozen=True)
class ObjectState:
    visibility: Visibility
    reach: Reach


def _assigned(track, assignment):
    j = track.id
    return any(tid == j for tid, _ in assignment.pairs) or j in assignment.created


def classify_visibility(track, assignment, camera, t):
    """InSight if the track got an observation at ``t``, otherwise Occluded
    when its location projects into the image, otherwise OutOfView."""
    if assignment is not None and assignment.frame == t and _assigned(track, assignment):
        return Visibility.IN_SIGHT
    if in_fov(track.location_at(t), camera.intrinsics, camera.pose):
        return Visibility.OCCLUDED
    return Visibility.OUT_OF_VIEW


def classify_reach(track, camera, t, config=None):
    """InReach when the track location is within ``eta`` of the camera center."""
    config = config or CognitionConfig()
    distance = np.linalg.norm(track.location_at(t) - camera.pose.center)
    return Reach.IN_REACH if distance <= config.eta else Reach.OUT_OF_REACH


def classify_motion(track, t1, t2, config=None):
    """Moved when the track location changed by at least ``epsilon``."""
    config = config or CognitionConfig()
    displacement = np.linalg.norm(track.location_at(t2) - track.location_at(t1))
    return Motion.MOVED if displacement >= config.epsilon else Motion.STATIONARY


def classify_state(track, assignment, camera, t, config=None):
    return ObjectState(classify_visibility(track, assignment, camera, t),
                       classify_reach(track, camera, t, config))


# vectorised forms used by the evaluator

def visibility_codes(observed, in_view):
    """0 = InSight, 1 = Occluded, 2 = OutOfView (indices into VISIBILITY_ORDER)."""
    observed = np.asarray(observed, dtype=bool)
    in_view = np.asarray(in_view, dtype=bool)
    return np.where(observed, 0, np.where(in_view, 1, 2))


def reach_codes(distances, eta):
    """0 = InReach, 1 = OutOfReach (indices into REACH_ORDER)."""
    return np.where(np.asarray(distances) <= eta, 0, 1)


def moved_mask(displacements, epsilon):
    return np.asarray(displacements) >= epsilon
