"""Comparison trackers run on the same lifted observation stream as LMK."""

import numpy as np

from ._validation import check_scalar
from .exceptions import InvalidInputError
from .geometry import CameraTimeline
from .tracker import (
    FrameAssignment,
    LMKTracker,
    MatcherConfig,
    OnlineTracker,
    apply_assignment,
    match_frame,
)

BASELINES = ("random", "osl", "osom", "retrieval")


def random_step(frame_data, tracks, rng, gamma=100):
    """Assign each observation uniformly to an unclaimed track or a new track.

    Tracks claimed earlier in the same frame are removed from later draws.
    """
    unclaimed = [int(j) for j in np.flatnonzero(tracks.alive)]
    pairs = []
    new = []
    for n in range(len(frame_data)):
        choice = int(rng.integers(len(unclaimed) + 1))
        if choice == len(unclaimed):
            new.append(n)
        else:
            pairs.append((unclaimed.pop(choice), n))
    assignment = FrameAssignment(frame_data.frame, tuple(sorted(pairs)), tuple(new))
    return apply_assignment(frame_data, tracks, assignment, gamma)


def osl_step(frame_data, tracks, config):
    """LMK step, then terminate every live track that has left the view."""
    assignment = match_frame(frame_data, tracks, config)
    assignment = apply_assignment(frame_data, tracks, assignment, config.gamma)
    cam = frame_data.camera
    live = np.flatnonzero(tracks.alive)
    if live.size:
        timeline = CameraTimeline({0: cam}, 1)
        visible = timeline.visible(tracks.locations(live), np.zeros(live.size, dtype=np.int64))
        for j in live[~visible]:
            tracks.terminate(int(j))
            tracks[int(j)].terminated_at = frame_data.frame
    return assignment


def osom_eligible(frame_data, tracks):
    """Live tracks whose current (frozen) location is in view at this frame."""
    live = np.flatnonzero(tracks.alive)
    if live.size == 0:
        return live
    timeline = CameraTimeline({0: frame_data.camera}, 1)
    visible = timeline.visible(tracks.locations(live), np.zeros(live.size, dtype=np.int64))
    return live[visible]


def osom_step(frame_data, tracks, config):
    """LMK step restricted to tracks currently in view."""
    assignment = match_frame(frame_data, tracks, config, eligible=osom_eligible(frame_data, tracks))
    return apply_assignment(frame_data, tracks, assignment, config.gamma)


def greedy_assignment(distance):
    """Accept (row, col) pairs in increasing distance, one-to-one.

    Ties resolve to the lowest row, then the lowest column.
    """
    distance = np.asarray(distance, dtype=np.float64)
    if distance.size == 0:
        return []
    n_r, n_c = distance.shape
    order = np.lexsort((np.tile(np.arange(n_c), n_r), np.repeat(np.arange(n_r), n_c),
                        distance.reshape(-1)))
    used_r = np.zeros(n_r, dtype=bool)
    used_c = np.zeros(n_c, dtype=bool)
    pairs = []
    for k in order:
        r, c = divmod(int(k), n_c)
        if used_r[r] or used_c[c]:
            continue
        used_r[r] = used_c[c] = True
        pairs.append((r, c))
        if len(pairs) == min(n_r, n_c):
            break
    return pairs


def retrieval_step(frame_data, tracks, config):
    """Greedy appearance retrieval against each track's most recent appearance."""
    t = frame_data.frame
    n_obs = len(frame_data)
    live = np.flatnonzero(tracks.alive)
    pairs = []
    if n_obs and live.size:
        if frame_data.appearance_dim != tracks.appearance_dim:
            raise InvalidInputError("appearance dimension mismatch")
        diff = tracks.last_appearances(live)[:, None, :] - frame_data.appearances[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        cost = np.log1p(config.beta_V * dist * dist)
        for r, c in greedy_assignment(dist):
            if cost[r, c] <= config.alpha:
                pairs.append((int(live[r]), c))
    matched = {c for _, c in pairs}
    assignment = FrameAssignment(t, tuple(sorted(pairs)),
                                 tuple(n for n in range(n_obs) if n not in matched))
    return apply_assignment(frame_data, tracks, assignment, config.gamma)


class RandomTracker(OnlineTracker):
    """Random matching: a lower bound showing how hard the data is."""

    method_name = "random"

    def __init__(self, seed=0, gamma=100):
        self.seed = seed
        self.gamma = gamma

    def _matcher_config(self):
        check_scalar(self.seed, "seed", min_val=0, integer=True)
        self._rng = np.random.default_rng(self.seed)
        return MatcherConfig(gamma=self.gamma)

    def _step(self, frame_data):
        return random_step(frame_data, self.tracks_, self._rng, self.config_.gamma)


class _VisibilityBaseline(LMKTracker):
    _needs_camera = True
    _has_lost = True

    def _timeline(self):
        key = (self.tracks_.current_frame, len(self.cameras_))
        if getattr(self, "_timeline_key", None) != key:
            self._timeline_cache = CameraTimeline(self.cameras_, self.tracks_.current_frame + 1)
            self._timeline_key = key
        return self._timeline_cache


class OSLTracker(_VisibilityBaseline):
    """Out of sight, lost: tracks are terminated once their location leaves
    the view and scored as lost from then on."""

    method_name = "osl"

    def _step(self, frame_data):
        return osl_step(frame_data, self.tracks_, self.config_)

    def _lost_mask(self, track_id):
        track = self.tracks_[track_id]
        n = self.tracks_.current_frame + 1
        lost = np.zeros(n, dtype=bool)
        end = track.terminated_at
        if end is not None:
            lost[end:] = True
        # the back-filled past is only known while the first location stayed in view
        birth = track.first_frame
        past = np.arange(birth)
        if birth:
            timeline = self._timeline()
            seen = timeline.visible(np.repeat(track.locations[0][None], birth, axis=0), past)
            unseen = np.flatnonzero(~seen)
            if unseen.size:
                lost[:unseen[-1] + 1] = True
        return lost


class OSOMTracker(_VisibilityBaseline):
    """Out of sight, out of mind: only in-view tracks are matchable, and a
    track is scored as lost whenever its location is out of view."""

    method_name = "osom"

    def _step(self, frame_data):
        return osom_step(frame_data, self.tracks_, self.config_)

    def _lost_mask(self, track_id):
        track = self.tracks_[track_id]
        n = self.tracks_.current_frame + 1
        frames = np.arange(n)
        idx = np.maximum(np.searchsorted(track.frames, frames, side="right") - 1, 0)
        locs = np.asarray(track.locations)[idx]
        return ~self._timeline().visible(locs, frames)


class RetrievalTracker(OnlineTracker):
    """Appearance retrieval matched to the most recent observation of each
    track, accepted greedily; a simplified adaptation of retrieval-style
    visual-query localisation."""

    method_name = "retrieval"

    def __init__(self, beta_V=2.0, alpha=10.0):
        self.beta_V = beta_V
        self.alpha = alpha

    def _matcher_config(self):
        return MatcherConfig(beta_V=self.beta_V, alpha=self.alpha, mode="V")

    def _step(self, frame_data):
        return retrieval_step(frame_data, self.tracks_, self.config_)


def make_tracker(method, mode="V+L", seed=0, **params):
    """Construct a tracker estimator by CLI method name."""
    method = method.lower()
    if method == "lmk":
        return LMKTracker(mode=mode, **params)
    if method == "osl":
        return OSLTracker(mode=mode, **params)
    if method == "osom":
        return OSOMTracker(mode=mode, **params)
    if method == "random":
        return RandomTracker(seed=seed, **{k: v for k, v in params.items() if k == "gamma"})
    if method == "retrieval":
        return RetrievalTracker(**{k: v for k, v in params.items() if k in ("beta_V", "alpha")})
    raise InvalidInputError(f"unknown method {method!r}; expected lmk or one of {BASELINES}")
