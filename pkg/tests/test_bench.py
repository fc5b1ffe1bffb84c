from types import SimpleNamespace

import numpy as np
import pytest

from worldtrack.baselines import make_tracker
from worldtrack.bench import (
    EvalConfig,
    aggregate,
    anchor_tracks,
    evaluate,
    evaluate_scenario,
    identity_purity,
    pcl,
    projection_error_stats,
    select_keyframes,
    stationary_pairs,
)
from worldtrack.exceptions import InsufficientDataError, InvalidInputError, InvalidQueryError
from worldtrack.tracker import FrameData, LMKTracker


def three_object_world():
    """21 frames at 1 fps.  Objects A, B, C rest at x = 1, 2, 3 and are seen
    for frames 0..10; at frame 15 C is moved 1 m sideways while unseen.
    Frame 10 is the only keyframe."""
    n = 21
    positions = np.tile(np.array([[1.0, 0, 0], [2.0, 0, 0], [3.0, 0, 0]]), (n, 1, 1))
    positions[15:, 2] = [3.0, 1.0, 0.0]
    observed = np.zeros((n, 3), bool)
    observed[:11] = True
    interacting = np.zeros((n, 3), bool)
    interacting[10] = True
    world = SimpleNamespace(
        positions=positions, observed=observed, in_view=observed.copy(), interacting=interacting,
        camera_centers=np.zeros((n, 3)), radii=np.array([0.1, 0.1, 0.1]),
        object_ids=("A", "B", "C"), frame_rate=1.0,
    )
    frames = []
    for t in range(n):
        seen = np.flatnonzero(observed[t])
        frames.append(FrameData(t, positions[t, seen], np.eye(3)[seen],
                                source_ids=[world.object_ids[i] for i in seen]))
    return world, LMKTracker().fit(frames).result()


def test_keyframes_need_three_interacting_objects():
    world, _ = three_object_world()
    assert select_keyframes(world) == [10]
    assert select_keyframes(world, EvalConfig(keyframe_min_objects=4)) == []


def test_anchors_skip_new_tracks():
    world, result = three_object_world()
    assert anchor_tracks(10, result, world) == {0: 0, 1: 1, 2: 2}
    assert anchor_tracks(0, result, world) == {}  # every track was born here


def test_hand_traced_pcl():
    world, result = three_object_world()
    assert pcl(result, world, 10, 0.0) == 1.0
    assert pcl(result, world, 10, 5.0) == pytest.approx(5 / 6)  # C is wrong at 15
    assert pcl(result, world, 10, 10.0) == pytest.approx(5 / 6)  # right at 0, wrong at 20
    assert pcl(result, world, 10, 5.0, directions="past") == 1.0
    assert pcl(result, world, 10, 5.0, radius=1.5) == 1.0
    with pytest.raises(InvalidQueryError):
        pcl(result, world, 10, 15.0)


def test_evaluator_matches_scalar_pcl():
    world, result = three_object_world()
    ev = evaluate_scenario(result, world, EvalConfig(deltas=(0, 5, 10, 15), radii=(0.3, "object")))
    assert ev.keyframe_pcl[(5.0, 0.3)].tolist() == pytest.approx([5 / 6])
    assert ev.keyframe_pcl[(5.0, "object")].tolist() == pytest.approx([5 / 6])
    assert ev.keyframe_pcl[(15.0, 0.3)].size == 0
    good, total = ev.motion[(5.0, 0.3)]
    assert total.tolist() == [5, 1] and good.tolist() == [5, 0]
    report = aggregate([ev])
    assert np.isnan(report.pcl("lmk", 15.0))
    assert report.pcl("lmk", 10.0) == pytest.approx(5 / 6)


def test_state_cells_partition_the_queries(small_scenario):
    result = LMKTracker().fit(small_scenario).result()
    ev = evaluate_scenario(result, small_scenario, EvalConfig(deltas=(0, 10, 30)))
    for key, (good, total) in ev.states.items():
        assert total.shape == (3, 2)
        mv_good, mv_total = ev.motion[key]
        assert total.sum() == mv_total.sum()
        assert good.sum() == mv_good.sum()
    # at delta 0 every anchored object was just observed
    good, total = ev.states[(0.0, 0.3)]
    assert total[1:].sum() == 0


def test_object_radius_needs_known_radii():
    world, result = three_object_world()
    world.radii = np.full(3, np.nan)
    with pytest.raises(InvalidInputError):
        evaluate_scenario(result, world, EvalConfig(deltas=(5,), radii=("object",)))


def test_pooling_is_over_keyframes_not_scenarios():
    world, result = three_object_world()
    config = EvalConfig(deltas=(5,))
    one = evaluate_scenario(result, world, config, "a")
    two = evaluate_scenario(result, world, config, "b")
    two.keyframe_pcl[(5.0, 0.3)] = np.array([0.0, 0.0, 0.0])
    report = aggregate([one, two])
    assert report.pcl("lmk", 5.0) == pytest.approx((5 / 6) / 4)
    assert [r["pcl_mean"] for r in report.scenarios] == pytest.approx([5 / 6, 0.0])


def test_rigid_motion_leaves_pcl_unchanged(small_scenario):
    rot = np.array([[0.0, -1, 0], [1, 0, 0], [0, 0, 1]])
    config = EvalConfig(deltas=(0, 20, 60))
    base = evaluate(LMKTracker().fit(small_scenario).result(), small_scenario, config)
    moved_sc = small_scenario.transformed(rot, [10.0, -4.0, 1.0])
    moved = evaluate(LMKTracker().fit(moved_sc).result(), moved_sc, config)
    for a, b in zip(base.rows, moved.rows):
        assert a["pcl_mean"] == pytest.approx(b["pcl_mean"], abs=1e-12)


def test_osl_never_recovers_a_lost_track(small_scenario):
    result = make_tracker("osl").fit(small_scenario).result()
    frames = np.arange(small_scenario.n_frames)
    for j in range(result.n_tracks):
        lost = np.isnan(result.locate(np.full(frames.size, j), frames)[:, 0])
        born = result.track_frames[j][0]
        after = lost[born:]
        if after.any():
            assert after[np.argmax(after):].all()


def test_identity_purity():
    _, result = three_object_world()
    assert identity_purity(result) == 1.0


def test_projection_error_stats_on_known_pairs():
    offsets = np.array([0.01, 0.03, 0.05, 0.07, 0.2])
    pairs = np.zeros((5, 2, 3))
    pairs[:, 1, 0] = offsets
    stats = projection_error_stats(pairs)
    assert stats.mean == pytest.approx(offsets.mean())
    assert stats.median == pytest.approx(0.05)
    assert stats.fraction_below[0.06] == pytest.approx(0.6)
    assert stats.fraction_below[0.10] == pytest.approx(0.8)
    assert sum(stats.histogram_counts) == 5
    with pytest.raises(InsufficientDataError):
        projection_error_stats(np.zeros((0, 2, 3)))


def test_stationary_pairs_share_an_object_at_rest(small_scenario):
    pairs = stationary_pairs(small_scenario, max_pairs=500)
    assert pairs.shape == (500, 2, 3)
    err = np.linalg.norm(pairs[:, 0] - pairs[:, 1], axis=1)
    assert np.median(err) < 0.2


def test_eval_config_validation():
    with pytest.raises(InvalidInputError):
        EvalConfig(deltas=(5, 1))
    with pytest.raises(InvalidInputError):
        EvalConfig(radii=(-0.1,))
    assert EvalConfig().deltas_for(101, 10.0) == (0.0, 5.0, 10.0)
