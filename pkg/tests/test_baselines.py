import numpy as np
import pytest

from worldtrack.baselines import (
    OSLTracker,
    OSOMTracker,
    RandomTracker,
    RetrievalTracker,
    greedy_assignment,
    make_tracker,
)
from worldtrack.exceptions import InvalidInputError
from worldtrack.geometry import CameraFrame, CameraIntrinsics, CameraPose, look_at
from worldtrack.tracker import FrameData, LMKTracker

K = CameraIntrinsics(300.0, 300.0, 320.0, 180.0, 640, 360)


def cam_looking(direction):
    target = {"x": (5, 0, 0), "-x": (-5, 0, 0)}[direction]
    return CameraFrame(look_at((0, 0, 0), target), K)


def fd(t, locs, apps, cam, sources=None):
    locs = np.asarray(locs, float).reshape(-1, 3)
    apps = np.asarray(apps, float).reshape(locs.shape[0], -1) if len(locs) else np.zeros((0, 0))
    return FrameData(t, locs, apps, source_ids=sources, camera=cam)


def test_greedy_retrieval_example():
    assert greedy_assignment([[0.1, 0.9], [0.2, 0.3]]) == [(0, 0), (1, 1)]


def test_greedy_ties_prefer_low_indices():
    assert greedy_assignment([[1, 1], [1, 1]]) == [(0, 0), (1, 1)]


def test_retrieval_uses_most_recent_appearance():
    cam = cam_looking("x")
    tr = RetrievalTracker()
    tr.partial_fit(fd(0, [(2, 0, 0)], [(1, 0, 0)], cam))
    tr.partial_fit(fd(1, [(2, 0, 0)], [(0, 1, 0)], cam))  # drifted appearance
    tr.partial_fit(fd(2, [(2, 0, 0), (2, 0.1, 0)], [(1, 0, 0), (0, 1, 0)], cam))
    a = tr.assignments_[-1]
    # the drifted vector is the one retrieved against
    assert (0, 1) in a.pairs


def test_random_is_seeded_and_respects_claims():
    cam = cam_looking("x")
    frames = [fd(t, np.random.default_rng(t).uniform(1, 2, (3, 3)), np.eye(3), cam) for t in range(20)]
    a = RandomTracker(seed=4).fit(frames).result()
    b = RandomTracker(seed=4).fit(frames).result()
    c = RandomTracker(seed=5).fit(frames).result()
    assert a.assign_tracks.tolist() == b.assign_tracks.tolist()
    assert a.assign_tracks.tolist() != c.assign_tracks.tolist()
    tr = RandomTracker(seed=1).fit(frames)
    for assignment in tr.assignments_:
        ids = [j for j, _ in assignment.pairs]
        assert len(ids) == len(set(ids))


def test_osl_loses_track_once_out_of_view_for_good():
    tr = OSLTracker()
    tr.partial_fit(fd(0, [(2, 0, 0)], [(1, 0)], cam_looking("x")))
    tr.partial_fit(fd(1, [], [], cam_looking("-x")))
    tr.partial_fit(fd(2, [], [], cam_looking("x")))
    assert tr.query_location(0, 0) is not None
    assert tr.query_location(0, 1) is None and tr.query_location(0, 2) is None
    # a re-sighting starts a fresh identity
    tr.partial_fit(fd(3, [(2, 0, 0)], [(1, 0)], cam_looking("x")))
    assert tr.assignments_[-1].created == (1,)
    res = tr.result()
    assert np.isnan(res.locate([0], [3])).all()


def test_osl_backfill_only_inside_contiguous_view():
    tr = OSLTracker()
    tr.partial_fit(fd(0, [], [], cam_looking("x")))
    tr.partial_fit(fd(1, [], [], cam_looking("-x")))
    tr.partial_fit(fd(2, [], [], cam_looking("x")))
    tr.partial_fit(fd(3, [(2, 0, 0)], [(1, 0)], cam_looking("x")))
    assert [tr.query_location(0, t) is None for t in range(4)] == [True, True, False, False]


def test_osom_only_matches_in_view_tracks():
    tr = OSOMTracker()
    tr.partial_fit(fd(0, [(2, 0, 0)], [(1, 0)], cam_looking("x")))
    # the object is seen again while its track's location is behind the camera
    tr.partial_fit(fd(1, [(-2, 0, 0)], [(1, 0)], cam_looking("-x")))
    assert tr.assignments_[-1].pairs == ()
    assert tr.query_location(0, 1) is None  # frozen and out of view
    lmk = LMKTracker()
    lmk.partial_fit(fd(0, [(2, 0, 0)], [(1, 0)], cam_looking("x")))
    lmk.partial_fit(fd(1, [(-2, 0, 0)], [(1, 0)], cam_looking("-x")))
    assert lmk.assignments_[-1].pairs == ((0, 0),)


def test_visibility_baselines_need_cameras():
    with pytest.raises(InvalidInputError):
        OSLTracker().fit([FrameData(0, np.zeros((1, 3)), np.ones((1, 2)))])


def test_make_tracker():
    assert isinstance(make_tracker("lmk", mode="V"), LMKTracker)
    assert make_tracker("random", seed=3).seed == 3
    assert isinstance(make_tracker("Retrieval", beta_L=4.0), RetrievalTracker)
    with pytest.raises(InvalidInputError):
        make_tracker("sort")


def test_baselines_on_a_scenario(small_scenario):
    for method in ("random", "osl", "osom", "retrieval"):
        res = make_tracker(method).fit(small_scenario).result()
        assert res.assign_tracks.size == small_scenario.obs_frame.size
