"""Online world-frame object tracking that keeps tracks alive out of sight.

Each frame's lifted observations are matched to the existing tracks with an
optimal one-to-one assignment over a cost that combines 3D distance (an
exponential similarity) and appearance distance (a Cauchy similarity).
Matched tracks take the observation's location and fold its appearance into a
rolling mean; unmatched tracks keep their last location; unmatched
observations start new tracks, back-filled to the start of the video.  Tracks
are never deleted.
"""

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.base import BaseEstimator

from ._validation import check_appearances, check_points, check_scalar
from .exceptions import InvalidInputError, InvalidQueryError

MODES = ("V+L", "V", "L")
_MODE_ALIASES = {"V+L": "V+L", "VL": "V+L", "V": "V", "V-only": "V", "L": "L", "L-only": "L"}


def normalize_mode(mode):
    try:
        return _MODE_ALIASES[mode]
    except (KeyError, TypeError):
        raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}") from None


@dataclass(frozen=True)
class MatcherConfig:
    beta_L: float = 13.0
    beta_V: float = 2.0
    alpha: float = 10.0
    gamma: int = 100
    mode: str = "V+L"

    def __post_init__(self):
        check_scalar(self.beta_L, "beta_L", min_val=0.0, include_min=False)
        check_scalar(self.beta_V, "beta_V", min_val=0.0)
        check_scalar(self.alpha, "alpha", min_val=0.0, include_min=False)
        check_scalar(self.gamma, "gamma", min_val=1, integer=True)
        object.__setattr__(self, "mode", normalize_mode(self.mode))


@dataclass(frozen=True)
class LiftedObservation:
    frame: int
    location: np.ndarray
    appearance: np.ndarray
    source_id: object = None
    interaction: bool = False


class FrameData:
    """All lifted observations of one frame, stored column-wise.

    ``camera`` is the frame's :class:`~worldtrack.geometry.CameraFrame`; LMK
    itself never reads it, the visibility-aware baselines do.
    """

    __slots__ = ("frame", "camera", "locations", "appearances", "source_ids", "interactions")

    def __init__(self, frame, locations, appearances, source_ids=None, camera=None,
                 interactions=None):
        frame = check_scalar(frame, "frame", min_val=0, integer=True)
        locations = check_points(locations, "locations")
        n = locations.shape[0]
        appearances = np.asarray(appearances, dtype=np.float64)
        if n == 0 and appearances.ndim < 2:
            appearances = appearances.reshape(0, 0)
        appearances = check_appearances(appearances, n)
        if source_ids is None:
            source_ids = (None,) * n
        source_ids = tuple(source_ids)
        if len(source_ids) != n:
            raise InvalidInputError("source_ids length does not match observations")
        if interactions is None:
            interactions = np.zeros(n, dtype=bool)
        interactions = np.asarray(interactions, dtype=bool).reshape(-1)
        if interactions.shape[0] != n:
            raise InvalidInputError("interactions length does not match observations")
        self.frame = frame
        self.camera = camera
        self.locations = locations
        self.appearances = appearances
        self.source_ids = source_ids
        self.interactions = interactions

    @classmethod
    def from_observations(cls, frame, observations, camera=None):
        observations = list(observations)
        for obs in observations:
            if obs.frame != frame:
                raise InvalidInputError(f"observation at frame {obs.frame} given for frame {frame}")
        if not observations:
            return cls(frame, np.empty((0, 3)), np.empty((0, 0)), camera=camera)
        return cls(
            frame,
            np.array([o.location for o in observations], dtype=np.float64),
            np.array([o.appearance for o in observations], dtype=np.float64),
            source_ids=[o.source_id for o in observations],
            camera=camera,
            interactions=[o.interaction for o in observations],
        )

    def __len__(self):
        return self.locations.shape[0]

    @property
    def appearance_dim(self):
        return self.appearances.shape[1] if len(self) else None

    def observations(self):
        return [
            LiftedObservation(self.frame, self.locations[i], self.appearances[i],
                              self.source_ids[i], bool(self.interactions[i]))
            for i in range(len(self))
        ]

    def replace(self, **changes):
        kwargs = {name: getattr(self, name) for name in self.__slots__}
        kwargs.update(changes)
        return FrameData(**kwargs)


class Track:
    """One object's location timeline and rolling appearance.

    Locations are stored as change points: ``frames[i]`` is the frame at
    which ``locations[i]`` was assigned, and the location at any ``t`` is the
    latest change point at or before ``t`` (the first one for earlier ``t``).
    This is exactly the carry-forward / back-fill timeline.
    """

    _MIN_CAPACITY = 4

    def __init__(self, track_id, frame, location, appearance, gamma):
        self.id = track_id
        self.gamma = gamma
        self.frames = [frame]
        self.locations = [np.array(location, dtype=np.float64)]
        self.first_frame = frame
        self.last_assigned_frame = frame
        self.terminated_at = None
        appearance = np.array(appearance, dtype=np.float64)
        self._buf = np.empty((min(gamma, self._MIN_CAPACITY), appearance.shape[0]))
        self._buf[0] = appearance
        self._count = 1
        self._head = 0  # next slot to overwrite once the ring is full
        self._sum = appearance.copy()
        self._since_refresh = 0
        self.appearance_mean = appearance.copy()
        self.last_appearance = appearance

    @property
    def location(self):
        return self.locations[-1]

    @property
    def appearance_buffer(self):
        """Buffered appearance vectors, oldest first."""
        if self._count < self.gamma:
            return self._buf[:self._count].copy()
        return np.concatenate([self._buf[self._head:], self._buf[:self._head]])

    def location_at(self, t):
        i = bisect.bisect_right(self.frames, t) - 1
        return self.locations[max(i, 0)]

    def assign(self, frame, location, appearance):
        if frame <= self.frames[-1]:
            raise InvalidInputError("track updates must move forward in time")
        self.frames.append(frame)
        self.locations.append(np.array(location, dtype=np.float64))
        self.last_assigned_frame = frame
        self._push(np.asarray(appearance, dtype=np.float64))

    def _push(self, appearance):
        self.last_appearance = appearance
        if self._count < self.gamma:
            if self._count == self._buf.shape[0]:
                grown = np.empty((min(self.gamma, 2 * self._buf.shape[0]), self._buf.shape[1]))
                grown[:self._count] = self._buf
                self._buf = grown
            self._buf[self._count] = appearance
            self._count += 1
            self._sum += appearance
        else:
            self._sum += appearance - self._buf[self._head]
            self._buf[self._head] = appearance
            self._head = (self._head + 1) % self.gamma
            self._since_refresh += 1
            if self._since_refresh >= self.gamma:
                # bound floating drift of the running sum
                self._sum = self._buf.sum(axis=0)
                self._since_refresh = 0
        self.appearance_mean = self._sum / self._count


class TrackSet:
    """Mutable set of tracks plus stacked per-track arrays for fast costing."""

    def __init__(self, appearance_dim=None):
        self.tracks = []
        self.current_frame = None
        self.appearance_dim = appearance_dim
        self._locs = None
        self._means = None
        self._lasts = None
        self._alive = np.zeros(0, dtype=bool)

    def __len__(self):
        return len(self.tracks)

    def __iter__(self):
        return iter(self.tracks)

    def __getitem__(self, track_id):
        return self.tracks[track_id]

    @property
    def alive(self):
        return self._alive[:len(self.tracks)]

    def _ensure_capacity(self, dim):
        n = len(self.tracks)
        if self._locs is None:
            cap = 16
            self._locs = np.empty((cap, 3))
            self._means = np.empty((cap, dim))
            self._lasts = np.empty((cap, dim))
            self._alive = np.zeros(cap, dtype=bool)
        elif n == self._locs.shape[0]:
            cap = 2 * n
            for name in ("_locs", "_means", "_lasts"):
                old = getattr(self, name)
                new = np.empty((cap, old.shape[1]))
                new[:n] = old
                setattr(self, name, new)
            alive = np.zeros(cap, dtype=bool)
            alive[:n] = self._alive[:n]
            self._alive = alive

    def add(self, frame, location, appearance, gamma):
        appearance = np.asarray(appearance, dtype=np.float64)
        if self.appearance_dim is None:
            self.appearance_dim = appearance.shape[0]
        elif appearance.shape[0] != self.appearance_dim:
            raise InvalidInputError(
                f"appearance dimension mismatch: expected {self.appearance_dim}, got {appearance.shape[0]}"
            )
        self._ensure_capacity(self.appearance_dim)
        track_id = len(self.tracks)
        track = Track(track_id, frame, location, appearance, gamma)
        self.tracks.append(track)
        self._locs[track_id] = track.location
        self._means[track_id] = track.appearance_mean
        self._lasts[track_id] = track.last_appearance
        self._alive[track_id] = True
        return track_id

    def assign(self, track_id, frame, location, appearance):
        track = self.tracks[track_id]
        track.assign(frame, location, appearance)
        self._locs[track_id] = track.location
        self._means[track_id] = track.appearance_mean
        self._lasts[track_id] = track.last_appearance

    def terminate(self, track_id):
        self._alive[track_id] = False

    def locations(self, ids=None):
        n = len(self.tracks)
        return self._locs[:n] if ids is None else self._locs[ids]

    def appearance_means(self, ids=None):
        n = len(self.tracks)
        if self._means is None:
            return np.empty((0, self.appearance_dim or 0))
        return self._means[:n] if ids is None else self._means[ids]

    def last_appearances(self, ids=None):
        n = len(self.tracks)
        if self._lasts is None:
            return np.empty((0, self.appearance_dim or 0))
        return self._lasts[:n] if ids is None else self._lasts[ids]

    def query_location(self, track_id, t):
        return query_location(self, track_id, t)


@dataclass(frozen=True)
class FrameAssignment:
    """``pairs`` holds (track id, observation index); ``new_tracks`` the
    observation indices that start tracks.  ``total_cost`` is the optimal
    assignment cost before thresholding."""

    frame: int
    pairs: tuple = ()
    new_tracks: tuple = ()
    total_cost: float = 0.0
    created: tuple = field(default=())

    def track_of(self):
        """Map observation index -> track id, for matched and created tracks."""
        out = {n: j for j, n in self.pairs}
        out.update(zip(self.new_tracks, self.created))
        return out


# -- similarities and cost -------------------------------------------------

def similarity_location(obs, track, t, config=None):
    """Exponential similarity of an observation to a track's location at ``t-1``."""
    beta_L = (config or MatcherConfig()).beta_L
    d = float(np.linalg.norm(track.location_at(t - 1) - np.asarray(obs.location)))
    return math.exp(-d) / beta_L


def similarity_appearance(obs, track, t, config=None):
    """Cauchy similarity of an observation's appearance to a track's mean.

    Appearance means only change on assignment, so the mean at ``t-1`` is the
    current mean as long as the track has not yet been updated at ``t``.
    """
    beta_V = (config or MatcherConfig()).beta_V
    if track.last_assigned_frame >= t:
        raise InvalidQueryError("track appearance at t-1 is no longer available")
    d = float(np.linalg.norm(track.appearance_mean - np.asarray(obs.appearance)))
    return 1.0 / (1.0 + beta_V * d * d)


def assignment_cost(obs, track, t, config=None):
    config = config or MatcherConfig()
    cost = 0.0
    if config.mode in ("V+L", "L"):
        d = float(np.linalg.norm(track.location_at(t - 1) - np.asarray(obs.location)))
        cost += math.log(config.beta_L) + d
    if config.mode in ("V+L", "V"):
        cost -= math.log(similarity_appearance(obs, track, t, config))
    return cost


def cost_matrix(track_locations, track_appearances, obs_locations, obs_appearances, config):
    """Full cost matrix, rows = tracks, columns = observations.

    ``-log`` of the similarities is expanded analytically so that large
    distances do not underflow.
    """
    n_t = track_locations.shape[0]
    n_o = obs_locations.shape[0]
    cost = np.zeros((n_t, n_o))
    if n_t == 0 or n_o == 0:
        return cost
    if config.mode in ("V+L", "L"):
        diff = track_locations[:, None, :] - obs_locations[None, :, :]
        cost += math.log(config.beta_L) + np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if config.mode in ("V+L", "V"):
        diff = track_appearances[:, None, :] - obs_appearances[None, :, :]
        cost += np.log1p(config.beta_V * np.einsum("ijk,ijk->ij", diff, diff))
    return cost


# -- assignment ------------------------------------------------------------

def _total(cost, rows, cols):
    return math.fsum(cost[r, c] for r, c in zip(rows, cols))


def _lexicographic_refine(cost, best):
    """Among optimal assignments pick the lexicographically smallest list of
    (row, col) pairs.  Only invoked when the matrix has repeated entries."""
    n_r, n_c = cost.shape
    need = min(n_r, n_c)
    tol = 1e-9 * max(1.0, abs(best))
    free_cols = list(range(n_c))
    fixed = []
    pairs = []
    for r in range(n_r):
        rest_rows = list(range(r + 1, n_r))
        chosen = False
        for c in free_cols + [None]:
            cols = [x for x in free_cols if x != c]
            k_needed = need - len(pairs) - (c is not None)
            if min(len(rest_rows), len(cols)) != k_needed:
                continue
            partial = fixed + ([cost[r, c]] if c is not None else [])
            if k_needed:
                sub = cost[np.ix_(rest_rows, cols)]
                sr, sc = linear_sum_assignment(sub)
                partial = partial + [sub[i, j] for i, j in zip(sr, sc)]
            if math.fsum(partial) <= best + tol:
                if c is not None:
                    pairs.append((r, c))
                    fixed.append(cost[r, c])
                    free_cols.remove(c)
                chosen = True
                break
        if not chosen:  # pragma: no cover - optimum always has a completion
            raise RuntimeError("lexicographic refinement lost feasibility")
    rows = np.array([p[0] for p in pairs], dtype=np.intp)
    cols = np.array([p[1] for p in pairs], dtype=np.intp)
    return rows, cols


def solve_assignment(cost):
    """Minimum-cost one-to-one assignment of a (possibly rectangular) matrix.

    Returns ``(rows, cols, total)`` with ``rows`` ascending.  Rectangular
    problems match ``min(n_rows, n_cols)`` pairs, equivalent to padding the
    short side with zero-cost dummies.  Equal-cost optima resolve to the
    lexicographically smallest (row, col) pairing.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise InvalidInputError("cost matrix must be 2-D")
    if cost.size == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp), 0.0
    if not np.all(np.isfinite(cost)):
        raise InvalidInputError("cost matrix must be finite")
    rows, cols = linear_sum_assignment(cost)
    total = _total(cost, rows, cols)
    if np.unique(cost).size < cost.size:
        rows, cols = _lexicographic_refine(cost, total)
        total = _total(cost, rows, cols)
    return rows, cols, total


def match_frame(frame_data, tracks, config, eligible=None):
    """Match one frame's observations to ``tracks`` (state through ``t-1``).

    ``eligible`` optionally restricts the candidate track ids (ascending);
    by default every live track is a candidate.
    """
    t = frame_data.frame
    n_obs = len(frame_data)
    if n_obs and tracks.appearance_dim is not None and frame_data.appearance_dim != tracks.appearance_dim:
        raise InvalidInputError(
            f"appearance dimension mismatch: expected {tracks.appearance_dim}, "
            f"got {frame_data.appearance_dim}"
        )
    if eligible is None:
        eligible = np.flatnonzero(tracks.alive)
    else:
        eligible = np.asarray(eligible, dtype=np.intp)
    if n_obs == 0 or eligible.size == 0:
        return FrameAssignment(t, (), tuple(range(n_obs)), 0.0)
    cost = cost_matrix(tracks.locations(eligible), tracks.appearance_means(eligible),
                       frame_data.locations, frame_data.appearances, config)
    rows, cols, total = solve_assignment(cost)
    keep = cost[rows, cols] <= config.alpha
    pairs = tuple((int(eligible[r]), int(c)) for r, c in zip(rows[keep], cols[keep]))
    matched = {c for _, c in pairs}
    new = tuple(n for n in range(n_obs) if n not in matched)
    return FrameAssignment(t, pairs, new, total)


# -- track lifecycle -------------------------------------------------------

def initialize_track(obs, tracks, t, config=None):
    """Start a track from ``obs``, back-filled to every frame before ``t``."""
    if obs.frame != t:
        raise InvalidInputError(f"observation frame {obs.frame} != {t}")
    gamma = (config or MatcherConfig()).gamma
    return tracks.add(t, obs.location, obs.appearance, gamma)


def update_track(track, obs, t, config=None, tracks=None):
    """Assign ``obs`` to ``track`` at ``t``; ``obs=None`` carries it forward.

    Carry-forward is implicit in the change-point timeline, so the no-obs
    case only validates time.  Pass ``tracks`` to keep the owning
    :class:`TrackSet` arrays in sync.
    """
    if obs is None:
        if t < track.frames[-1]:
            raise InvalidInputError("cannot carry a track backwards in time")
        return
    if tracks is not None:
        tracks.assign(track.id, t, obs.location, obs.appearance)
    else:
        track.assign(t, obs.location, obs.appearance)


def _check_frame_order(frame_data, tracks):
    if tracks.current_frame is not None and frame_data.frame <= tracks.current_frame:
        raise InvalidInputError(
            f"frame {frame_data.frame} is not after current frame {tracks.current_frame}"
        )


def apply_assignment(frame_data, tracks, assignment, gamma):
    """Update matched tracks, create new ones and advance time."""
    t = frame_data.frame
    locs, apps = frame_data.locations, frame_data.appearances
    for j, n in assignment.pairs:
        tracks.assign(j, t, locs[n], apps[n])
    created = tuple(tracks.add(t, locs[n], apps[n], gamma) for n in assignment.new_tracks)
    tracks.current_frame = t
    return FrameAssignment(t, assignment.pairs, assignment.new_tracks,
                           assignment.total_cost, created)


def step(frame_data, tracks, config, eligible=None):
    """Process one frame online; afterwards every track is defined at ``t``."""
    _check_frame_order(frame_data, tracks)
    assignment = match_frame(frame_data, tracks, config, eligible=eligible)
    return apply_assignment(frame_data, tracks, assignment, config.gamma)


def query_location(tracks, track_id, t):
    if not (0 <= track_id < len(tracks)):
        raise InvalidQueryError(f"unknown track id {track_id}")
    if tracks.current_frame is None or t > tracks.current_frame or t < 0:
        raise InvalidQueryError(f"frame {t} is outside [0, {tracks.current_frame}]")
    return tracks[track_id].location_at(t).copy()


# -- results ---------------------------------------------------------------

class TrackingResult:
    """Finished track timelines plus the per-observation assignment log.

    ``lost`` holds, per track, half-open ``[start, end)`` frame intervals in
    which the method has no location for the track (``end`` may be ``None``
    for "until the end").  Lost queries return NaN.
    """

    def __init__(self, method, mode, params, last_frame, track_frames, track_locations,
                 lost, assign_frames, assign_obs, assign_sources, assign_tracks, assign_new):
        self.method = method
        self.mode = mode
        self.params = dict(params)
        self.last_frame = last_frame
        self.track_frames = [np.asarray(f, dtype=np.int64) for f in track_frames]
        self.track_locations = [np.asarray(l, dtype=np.float64).reshape(-1, 3) for l in track_locations]
        self.lost = [list(map(tuple, intervals)) for intervals in lost]
        self.assign_frames = np.asarray(assign_frames, dtype=np.int64)
        self.assign_obs = np.asarray(assign_obs, dtype=np.int64)
        self.assign_sources = list(assign_sources)
        self.assign_tracks = np.asarray(assign_tracks, dtype=np.int64)
        self.assign_new = np.asarray(assign_new, dtype=bool)
        self._by_frame = None

    @property
    def n_tracks(self):
        return len(self.track_frames)

    def _frame_index(self):
        if self._by_frame is None:
            index = {}
            for i, f in enumerate(self.assign_frames.tolist()):
                index.setdefault(f, []).append(i)
            self._by_frame = index
        return self._by_frame

    def frame_records(self, frame):
        """(source_id, track id, is_new) for each observation at ``frame``."""
        return [(self.assign_sources[i], int(self.assign_tracks[i]), bool(self.assign_new[i]))
                for i in self._frame_index().get(frame, [])]

    def is_lost(self, track_ids, frames):
        track_ids = np.asarray(track_ids, dtype=np.int64)
        frames = np.asarray(frames, dtype=np.int64)
        out = np.zeros(track_ids.shape, dtype=bool)
        for j in np.unique(track_ids):
            intervals = self.lost[j]
            if not intervals:
                continue
            sel = track_ids == j
            f = frames[sel]
            hit = np.zeros(f.shape, dtype=bool)
            for start, end in intervals:
                hit |= (f >= start) & ((f < end) if end is not None else True)
            out[sel] = hit
        return out

    def locate(self, track_ids, frames):
        """Vectorised location lookup; NaN rows for lost (track, frame)."""
        track_ids = np.asarray(track_ids, dtype=np.int64).reshape(-1)
        frames = np.asarray(frames, dtype=np.int64).reshape(-1)
        out = np.full((track_ids.shape[0], 3), np.nan)
        for j in np.unique(track_ids):
            sel = np.flatnonzero(track_ids == j)
            idx = np.searchsorted(self.track_frames[j], frames[sel], side="right") - 1
            out[sel] = self.track_locations[j][np.maximum(idx, 0)]
        out[self.is_lost(track_ids, frames)] = np.nan
        return out


def _lost_intervals(mask):
    """Half-open intervals where boolean ``mask`` is true."""
    if not mask.any():
        return []
    padded = np.concatenate([[False], mask, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return [(int(s), int(e)) for s, e in zip(edges[::2], edges[1::2])]


class OnlineTracker(BaseEstimator):
    """Shared fit/partial_fit/predict machinery for the online trackers.

    ``fit(frames)`` resets the state and consumes an iterable of
    :class:`FrameData` (or a scenario exposing ``.frames()``);
    ``partial_fit(frame)`` consumes one more frame.  ``predict(track_ids,
    frames)`` returns an ``(n, 3)`` array of track locations with NaN where the
    method has lost the track.
    """

    method_name = "online"
    _needs_camera = False

    def _reset(self):
        self.tracks_ = TrackSet()
        self.assignments_ = []
        self.cameras_ = {}
        self._log = ([], [], [], [], [])

    def _matcher_config(self):
        raise NotImplementedError

    def fit(self, X, y=None):
        self._reset()
        self.config_ = self._matcher_config()
        frames = X.frames() if hasattr(X, "frames") else X
        for frame_data in frames:
            self._partial(frame_data)
        return self

    def partial_fit(self, X, y=None):
        if not hasattr(self, "tracks_"):
            self._reset()
            self.config_ = self._matcher_config()
        self._partial(X)
        return self

    def _partial(self, frame_data):
        if not isinstance(frame_data, FrameData):
            raise InvalidInputError(f"expected FrameData, got {type(frame_data).__name__}")
        if self._needs_camera and frame_data.camera is None:
            raise InvalidInputError(f"{self.method_name} needs a camera for every frame")
        _check_frame_order(frame_data, self.tracks_)
        assignment = self._step(frame_data)
        self.assignments_.append(assignment)
        if frame_data.camera is not None:
            self.cameras_[frame_data.frame] = frame_data.camera
        frames, obs, sources, track_ids, new = self._log
        matched = dict((n, j) for j, n in assignment.pairs)
        created = dict(zip(assignment.new_tracks, assignment.created))
        for n in range(len(frame_data)):
            frames.append(frame_data.frame)
            obs.append(n)
            sources.append(frame_data.source_ids[n])
            if n in matched:
                track_ids.append(matched[n])
                new.append(False)
            else:
                track_ids.append(created[n])
                new.append(True)

    def _step(self, frame_data):
        raise NotImplementedError

    @property
    def n_tracks_(self):
        return len(self.tracks_)

    def query_location(self, track_id, t):
        """Location of ``track_id`` at ``t``, or ``None`` if the method lost it."""
        loc = query_location(self.tracks_, track_id, t)
        if self._has_lost and self._lost_mask(track_id)[t]:
            return None
        return loc

    _has_lost = False

    def _lost_mask(self, track_id):
        """Boolean array over frames ``0..current`` where the track is lost."""
        return np.zeros(self.tracks_.current_frame + 1, dtype=bool)

    def predict(self, track_ids, frames):
        return self.result().locate(track_ids, frames)

    def _params_for_report(self):
        return self.get_params()

    def result(self):
        tracks = self.tracks_
        last = tracks.current_frame if tracks.current_frame is not None else -1
        lost = []
        for track in tracks:
            lost.append(_lost_intervals(self._lost_mask(track.id)) if self._has_lost else [])
        frames, obs, sources, track_ids, new = self._log
        return TrackingResult(
            self.method_name, getattr(self.config_, "mode", "V+L"), self._params_for_report(), last,
            [t.frames for t in tracks], [np.array(t.locations) for t in tracks], lost,
            frames, obs, sources, track_ids, new,
        )


class LMKTracker(OnlineTracker):
    """Lift-match-keep world-frame multi-object tracker.

    Parameters
    ----------
    beta_L : float
        Location weight of the exponential similarity.
    beta_V : float
        Appearance weight of the Cauchy similarity.
    alpha : float
        Assignment-cost threshold; matched pairs above it start new tracks.
    gamma : int
        Number of most recent appearance vectors averaged per track.
    mode : {"V+L", "V", "L"}
        Which cost terms to use.
    """

    method_name = "lmk"

    def __init__(self, beta_L=13.0, beta_V=2.0, alpha=10.0, gamma=100, mode="V+L"):
        self.beta_L = beta_L
        self.beta_V = beta_V
        self.alpha = alpha
        self.gamma = gamma
        self.mode = mode

    def _matcher_config(self):
        return MatcherConfig(self.beta_L, self.beta_V, self.alpha, self.gamma, self.mode)

    def _step(self, frame_data):
        return step(frame_data, self.tracks_, self.config_)
