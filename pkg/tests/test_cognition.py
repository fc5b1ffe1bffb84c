import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from worldtrack.cognition import (
    CognitionConfig,
    Motion,
    Reach,
    Visibility,
    classify_motion,
    classify_reach,
    classify_state,
    classify_visibility,
    reach_codes,
    visibility_codes,
)
from worldtrack.exceptions import InvalidInputError
from worldtrack.geometry import CameraFrame, CameraIntrinsics, CameraPose
from worldtrack.tracker import FrameAssignment, LiftedObservation, LMKTracker, TrackSet, initialize_track

K = CameraIntrinsics(300.0, 300.0, 320.0, 180.0, 640, 360)
CAM = CameraFrame(CameraPose.identity(), K)


def track_at(loc, t=0):
    tracks = TrackSet()
    initialize_track(LiftedObservation(t, np.asarray(loc, float), np.array([1.0, 0.0])), tracks, t)
    return tracks[0]


def test_assignment_wins_over_geometry():
    tr = track_at((0, 0, -5))  # behind the camera
    a = FrameAssignment(3, pairs=((0, 0),))
    assert classify_visibility(tr, a, CAM, 3) is Visibility.IN_SIGHT


def test_unassigned_inside_frustum_is_occluded():
    tr = track_at((0, 0, 2))
    assert classify_visibility(tr, FrameAssignment(3), CAM, 3) is Visibility.OCCLUDED


def test_unassigned_behind_camera_is_out_of_view():
    tr = track_at((0, 0, -2))
    v = classify_visibility(tr, FrameAssignment(3), CAM, 3)
    assert v is Visibility.OUT_OF_VIEW and v.out_of_sight


@pytest.mark.parametrize("distance,expected", [(0.69, Reach.IN_REACH), (0.71, Reach.OUT_OF_REACH),
                                               (0.70, Reach.IN_REACH)])
def test_reach_boundary(distance, expected):
    assert classify_reach(track_at((distance, 0, 0)), CAM, 0) is expected


def test_motion_thresholds():
    tracks = TrackSet()
    initialize_track(LiftedObservation(0, np.zeros(3), np.array([1.0, 0.0])), tracks, 0)
    tracks.assign(0, 1, np.array([0.35, 0, 0]), np.array([1.0, 0.0]))
    tracks.assign(0, 2, np.array([0.3, 0, 0]), np.array([1.0, 0.0]))
    tracks.assign(0, 3, np.array([0.29, 0, 0]), np.array([1.0, 0.0]))
    tr = tracks[0]
    assert classify_motion(tr, 0, 1) is Motion.MOVED
    assert classify_motion(tr, 0, 0) is Motion.STATIONARY
    assert classify_motion(tr, 0, 2) is Motion.MOVED  # boundary counts as moved
    assert classify_motion(tr, 0, 3) is Motion.STATIONARY


@given(st.tuples(*[st.floats(-3, 3)] * 3), st.tuples(*[st.floats(-3, 3)] * 3))
def test_motion_is_symmetric(a, b):
    tracks = TrackSet()
    initialize_track(LiftedObservation(0, np.asarray(a), np.array([1.0, 0.0])), tracks, 0)
    tracks.assign(0, 1, np.asarray(b), np.array([1.0, 0.0]))
    assert classify_motion(tracks[0], 0, 1) is classify_motion(tracks[0], 1, 0) or \
        classify_motion(tracks[0], 0, 1) == classify_motion(tracks[0], 1, 0)


def test_state_axes_are_independent():
    # inside the frustum, unassigned, and within arm's reach
    state = classify_state(track_at((0, 0, 0.5)), FrameAssignment(0, ()), CAM, 0)
    assert state.visibility is Visibility.OCCLUDED and state.reach is Reach.IN_REACH


def test_config_validation():
    with pytest.raises(InvalidInputError):
        CognitionConfig(eta=0)
    with pytest.raises(InvalidInputError):
        CognitionConfig(epsilon=-1)


def test_vectorised_codes():
    assert visibility_codes([True, False, False], [False, True, False]).tolist() == [0, 1, 2]
    assert reach_codes([0.7, 0.7000001], 0.7).tolist() == [0, 1]


def test_in_sight_iff_assigned_on_a_run(small_scenario):
    tracker = LMKTracker().fit(small_scenario)
    for a in tracker.assignments_[::50]:
        t = a.frame
        cam = small_scenario.camera(t)
        assigned = {j for j, _ in a.pairs} | set(a.created)
        for tr in tracker.tracks_:
            if tr.first_frame > t:
                continue
            vis = classify_visibility(tr, a, cam, t)
            assert (vis is Visibility.IN_SIGHT) == (tr.id in assigned)
