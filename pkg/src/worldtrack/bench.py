"""Evaluation: keyframes, anchoring, Percentage of Correct Locations (PCL),
state-stratified breakdowns and the pairwise projection-error analysis.

The ground-truth object passed to these functions needs the attributes a
:class:`~worldtrack.simulator.Scenario` provides: ``positions``, ``in_view``,
``observed``, ``interacting``, ``camera_centers``, ``radii``, ``object_ids``
and ``frame_rate``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_scalar
from .cognition import REACH_ORDER, VISIBILITY_ORDER, moved_mask, reach_codes, visibility_codes
from .exceptions import InsufficientDataError, InvalidInputError, InvalidQueryError

OBJECT_RADIUS = "object"


@dataclass(frozen=True)
class EvalConfig:
    """``radii`` entries are meters or ``"object"`` for each object's own
    radius.  ``deltas`` are seconds; ``None`` means 5 s steps from 0 to the
    scenario length."""

    radii: tuple = (0.30,)
    deltas: tuple = None
    keyframe_min_objects: int = 3
    eta: float = 0.70
    epsilon: float = 0.30
    directions: str = "both"

    def __post_init__(self):
        radii = tuple(self.radii) if not isinstance(self.radii, (int, float, str)) else (self.radii,)
        object.__setattr__(self, "radii", radii)
        for r in radii:
            if r != OBJECT_RADIUS:
                check_scalar(r, "radius", min_val=0.0, include_min=False)
        if self.deltas is not None:
            deltas = tuple(float(d) for d in self.deltas)
            if any(d < 0 for d in deltas) or list(deltas) != sorted(deltas):
                raise InvalidInputError("deltas must be non-negative and sorted ascending")
            object.__setattr__(self, "deltas", deltas)
        check_scalar(self.keyframe_min_objects, "keyframe_min_objects", min_val=1, integer=True)
        check_scalar(self.eta, "eta", min_val=0.0, include_min=False)
        check_scalar(self.epsilon, "epsilon", min_val=0.0, include_min=False)
        if self.directions not in ("both", "past", "future"):
            raise InvalidInputError("directions must be 'both', 'past' or 'future'")

    def deltas_for(self, n_frames, frame_rate):
        if self.deltas is not None:
            return self.deltas
        length = (n_frames - 1) / frame_rate
        return tuple(float(d) for d in np.arange(0.0, length + 1e-9, 5.0))

    def to_dict(self):
        return {"radii": list(self.radii), "deltas": None if self.deltas is None else list(self.deltas),
                "keyframe_min_objects": self.keyframe_min_objects, "eta": self.eta,
                "epsilon": self.epsilon, "directions": self.directions}


def select_keyframes(scenario, config=None):
    """Frames where at least ``keyframe_min_objects`` objects are inside an
    interaction window."""
    config = config or EvalConfig()
    counts = np.asarray(scenario.interacting, dtype=bool).sum(axis=1)
    return [int(f) for f in np.flatnonzero(counts >= config.keyframe_min_objects)]


def anchor_tracks(f, result, scenario):
    """Map object index -> track id for objects whose observation at ``f`` was
    matched to an existing track.  Observations that started a new track at
    ``f`` (nothing passed the gate) are left out."""
    index = {sid: i for i, sid in enumerate(scenario.object_ids)}
    out = {}
    for source, track, is_new in result.frame_records(f):
        if is_new or source not in index:
            continue
        out.setdefault(index[source], track)
    return out


def _frames(delta_seconds, frame_rate):
    return int(round(delta_seconds * frame_rate))


def _thresholds(radius, objects, radii):
    if radius == OBJECT_RADIUS:
        out = np.asarray(radii, dtype=np.float64)[objects]
        if np.any(np.isnan(out)):
            raise InvalidInputError("per-object radii are unknown for this ground truth")
        return out
    return np.full(len(objects), float(radius))


def pcl(result, scenario, f, delta_seconds, radius=0.30, directions="both"):
    """PCL of the objects anchored at keyframe ``f`` queried at ``f +/- delta``."""
    anchors = anchor_tracks(f, result, scenario)
    n = scenario.positions.shape[0]
    d = _frames(delta_seconds, scenario.frame_rate)
    signs = {"both": (1, -1), "future": (1,), "past": (-1,)}[directions]
    queries = sorted({f + s * d for s in signs if 0 <= f + s * d < n})
    if not queries:
        raise InvalidQueryError(f"f={f} +/- {d} frames is outside [0, {n})")
    if not anchors:
        return float("nan")
    objects = np.array(sorted(anchors))
    tracks = np.array([anchors[i] for i in objects])
    correct = total = 0
    thresh = _thresholds(radius, objects, scenario.radii)
    for q in queries:
        pred = result.locate(tracks, np.full(tracks.size, q))
        err = np.linalg.norm(pred - scenario.positions[q, objects], axis=1)
        correct += int(np.sum(err <= thresh))  # NaN (lost) compares False
        total += objects.size
    return correct / total


def identity_purity(result):
    """Fraction of observations credited to the track that the first
    observation of their source started; 1.0 means a perfect one-to-one
    identity over the whole stream."""
    if result.assign_tracks.size == 0:
        return 1.0
    owner_of_source, source_of_track = {}, {}
    good = 0
    for source, track in zip(result.assign_sources, result.assign_tracks.tolist()):
        owner_of_source.setdefault(source, track)
        source_of_track.setdefault(track, source)
        good += owner_of_source[source] == track and source_of_track[track] == source
    return good / result.assign_tracks.size


@dataclass
class ScenarioEvaluation:
    """Raw per-keyframe numbers for one (method, scenario)."""

    name: str
    method: str
    mode: str
    n_keyframes: int
    n_objects: int
    keyframe_pcl: dict = field(default_factory=dict)  # (delta, radius) -> array per keyframe
    states: dict = field(default_factory=dict)  # (delta, radius) -> (correct[3,2], total[3,2])
    motion: dict = field(default_factory=dict)  # (delta, radius) -> (correct[2], total[2])


def evaluate_scenario(result, scenario, config=None, name="scenario"):
    """Evaluate a finished tracking result against ground truth."""
    config = config or EvalConfig()
    positions = np.asarray(scenario.positions)
    n = positions.shape[0]
    keyframes = select_keyframes(scenario, config)
    kf_idx, objs, trks = [], [], []
    for k, f in enumerate(keyframes):
        anchors = anchor_tracks(f, result, scenario)
        for i in sorted(anchors):
            kf_idx.append(k)
            objs.append(i)
            trks.append(anchors[i])
    kf_idx = np.array(kf_idx, dtype=np.int64)
    objs = np.array(objs, dtype=np.int64)
    trks = np.array(trks, dtype=np.int64)
    kf_frames = np.array(keyframes, dtype=np.int64)[kf_idx] if kf_idx.size else np.zeros(0, np.int64)
    observed = np.asarray(scenario.observed)
    in_view = np.asarray(scenario.in_view)
    centers = np.asarray(scenario.camera_centers)
    signs = {"both": (1, -1), "future": (1,), "past": (-1,)}[config.directions]
    out = ScenarioEvaluation(name, result.method, result.mode, len(keyframes),
                             int(np.unique(objs).size))
    for delta in config.deltas_for(n, scenario.frame_rate):
        d = _frames(delta, scenario.frame_rate)
        rows, qf = [], []
        for s in signs if d else (1,):
            q = kf_frames + s * d
            ok = (q >= 0) & (q < n)
            rows.append(np.flatnonzero(ok))
            qf.append(q[ok])
        rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
        qf = np.concatenate(qf) if qf else np.zeros(0, np.int64)
        o, k, f0 = objs[rows], kf_idx[rows], kf_frames[rows]
        pred = result.locate(trks[rows], qf)
        true = positions[qf, o]
        err = np.linalg.norm(pred - true, axis=1)
        vis = visibility_codes(observed[qf, o], in_view[qf, o])
        reach = reach_codes(np.linalg.norm(true - centers[qf], axis=1), config.eta)
        moved = moved_mask(np.linalg.norm(true - positions[f0, o], axis=1), config.epsilon)
        for radius in config.radii:
            correct = err <= _thresholds(radius, o, scenario.radii)
            tot_k = np.bincount(k, minlength=len(keyframes))
            cor_k = np.bincount(k, weights=correct, minlength=len(keyframes))
            has = tot_k > 0
            out.keyframe_pcl[(delta, radius)] = cor_k[has] / tot_k[has]
            cell = vis * len(REACH_ORDER) + reach
            total = np.bincount(cell, minlength=6).reshape(3, 2)
            good = np.bincount(cell, weights=correct, minlength=6).reshape(3, 2).astype(np.int64)
            out.states[(delta, radius)] = (good, total)
            mv = moved.astype(np.int64)
            out.motion[(delta, radius)] = (
                np.bincount(mv, weights=correct, minlength=2).astype(np.int64),
                np.bincount(mv, minlength=2),
            )
    return out


@dataclass
class EvalReport:
    """Aggregated tables.  ``rows`` is the main PCL table; ``states``,
    ``motion`` and ``scenarios`` are the sibling tables."""

    rows: list
    states: list
    motion: list
    scenarios: list
    params: dict = field(default_factory=dict)
    projection: dict = None

    def pcl(self, method, delta, radius=0.30, mode=None):
        for r in self.rows:
            if r["method"] == method and r["delta_seconds"] == delta and r["radius_m"] == radius \
                    and (mode is None or r["mode"] == mode):
                return r["pcl_mean"]
        raise KeyError((method, mode, delta, radius))

    def motion_pcl(self, method, motion, mode=None):
        """Pooled PCL of one motion class over all deltas and radii."""
        good = total = 0
        for r in self.motion:
            if r["method"] == method and r["motion"] == motion and (mode is None or r["mode"] == mode):
                good += r["correct"]
                total += r["n"]
        return good / total if total else float("nan")


def _fmt_radius(radius):
    return radius if radius == OBJECT_RADIUS else float(radius)


def aggregate(evaluations, params=None):
    """Pool per-keyframe PCL across scenarios for each (method, mode)."""
    groups = {}
    for ev in evaluations:
        groups.setdefault((ev.method, ev.mode), []).append(ev)
    rows, states, motion, scen = [], [], [], []
    for (method, mode), evs in groups.items():
        keys = list(evs[0].keyframe_pcl)
        for key in keys:
            delta, radius = key
            vals = np.concatenate([e.keyframe_pcl[key] for e in evs if key in e.keyframe_pcl])
            rows.append({
                "method": method, "mode": mode, "delta_seconds": delta, "radius_m": _fmt_radius(radius),
                "pcl_mean": float(np.mean(vals)) if vals.size else float("nan"),
                "pcl_std": float(np.std(vals)) if vals.size else float("nan"),
                "n_keyframes": int(vals.size),
                "n_objects": int(sum(e.n_objects for e in evs)),
            })
            good = sum(e.states[key][0] for e in evs)
            total = sum(e.states[key][1] for e in evs)
            for a, vis in enumerate(VISIBILITY_ORDER):
                for b, reach in enumerate(REACH_ORDER):
                    states.append({
                        "method": method, "mode": mode, "delta_seconds": delta,
                        "radius_m": _fmt_radius(radius), "visibility": vis.value,
                        "reach": reach.value, "n": int(total[a, b]), "correct": int(good[a, b]),
                        "pcl": float(good[a, b] / total[a, b]) if total[a, b] else float("nan"),
                    })
            mg = sum(e.motion[key][0] for e in evs)
            mt = sum(e.motion[key][1] for e in evs)
            for b, label in ((0, "Stationary"), (1, "Moved")):
                motion.append({
                    "method": method, "mode": mode, "delta_seconds": delta,
                    "radius_m": _fmt_radius(radius), "motion": label, "n": int(mt[b]),
                    "correct": int(mg[b]), "pcl": float(mg[b] / mt[b]) if mt[b] else float("nan"),
                })
            for e in evs:
                v = e.keyframe_pcl.get(key, np.zeros(0))
                scen.append({
                    "method": method, "mode": mode, "scenario": e.name, "delta_seconds": delta,
                    "radius_m": _fmt_radius(radius),
                    "pcl_mean": float(np.mean(v)) if v.size else float("nan"),
                    "n_keyframes": int(v.size),
                })
    return EvalReport(rows, states, motion, scen, dict(params or {}))


def evaluate(result, scenario, config=None, name="scenario", params=None):
    """Single-scenario :class:`EvalReport`."""
    return aggregate([evaluate_scenario(result, scenario, config, name)], params)


stratified_report = evaluate


# -- projection error analysis ---------------------------------------------

THRESHOLDS = (0.06, 0.10)
PERCENTILES = (50, 75, 88, 90, 95, 99)


@dataclass(frozen=True)
class ProjectionErrorStats:
    n_pairs: int
    mean: float
    median: float
    std: float
    fraction_below: dict
    percentiles: dict
    histogram_edges: tuple
    histogram_counts: tuple

    def to_dict(self):
        return {
            "n_pairs": self.n_pairs, "mean": self.mean, "median": self.median, "std": self.std,
            "fraction_below": {str(k): v for k, v in self.fraction_below.items()},
            "percentiles": {str(k): v for k, v in self.percentiles.items()},
            "histogram_edges": list(self.histogram_edges),
            "histogram_counts": list(self.histogram_counts),
        }


def projection_error_stats(pairs, bin_width=0.01, max_error=0.30):
    """Statistics of pairwise distances between two lifted observations of the
    same stationary object.

    ``pairs`` is an array of shape (n, 2, 3) or a sequence of observation
    pairs with a ``location`` attribute.
    """
    if len(pairs) and hasattr(pairs[0][0], "location"):
        pairs = [[a.location, b.location] for a, b in pairs]
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.size == 0 or arr.ndim != 3 or arr.shape[0] < 1:
        raise InsufficientDataError("projection error analysis needs at least one pair (2 observations)")
    if arr.shape[1:] != (2, 3):
        raise InvalidInputError(f"pairs must have shape (n, 2, 3), got {arr.shape}")
    err = np.linalg.norm(arr[:, 0] - arr[:, 1], axis=1)
    edges = np.append(np.arange(0.0, max_error + 1e-12, bin_width), np.inf)
    counts, _ = np.histogram(err, bins=edges)
    return ProjectionErrorStats(
        n_pairs=int(err.size), mean=float(err.mean()), median=float(np.median(err)),
        std=float(err.std()),
        fraction_below={t: float(np.mean(err < t)) for t in THRESHOLDS},
        percentiles={p: float(np.percentile(err, p)) for p in PERCENTILES},
        histogram_edges=tuple(float(e) for e in edges), histogram_counts=tuple(int(c) for c in counts),
    )


def stationary_pairs(scenario, max_pairs=10000, seed=0):
    """Sample observation pairs of the same object taken while its true
    location did not change (and it was not being carried)."""
    rng = np.random.default_rng(seed)
    frames = np.asarray(scenario.obs_frame)
    objs = np.asarray(scenario.obs_object)
    locs = np.asarray(scenario.obs_location)
    positions = np.asarray(scenario.positions)
    carried = np.asarray(scenario.carried)
    keep = ~carried[frames, objs]
    groups = {}
    for n in np.flatnonzero(keep):
        key = (int(objs[n]), tuple(positions[frames[n], objs[n]]))
        groups.setdefault(key, []).append(n)
    return _sample_pairs(list(groups.values()), locs, max_pairs, rng)


def _sample_pairs(groups, locs, max_pairs, rng):
    groups = [np.asarray(g) for g in groups if len(g) >= 2]
    if not groups:
        raise InsufficientDataError("no stationary object was observed twice")
    sizes = np.array([g.size for g in groups], dtype=np.float64)
    weights = sizes * (sizes - 1)
    weights /= weights.sum()
    pick = rng.choice(len(groups), size=max_pairs, p=weights)
    out = np.empty((max_pairs, 2, 3))
    for k, g in enumerate(pick):
        a, b = rng.choice(groups[g].size, size=2, replace=False)
        out[k, 0] = locs[groups[g][a]]
        out[k, 1] = locs[groups[g][b]]
    return out


def stationary_pairs_from_log(log, max_pairs=10000, seed=0):
    """Pairs for logs without true trajectories: observations of the same
    source between two interactions are taken to be of a resting object."""
    rng = np.random.default_rng(seed)
    locs, keys = [], []
    segment = {}
    for fd in log.frames():
        for n, source in enumerate(fd.source_ids or []):
            if source is None:
                continue
            if fd.interactions[n]:
                segment[source] = segment.get(source, 0) + 1
                continue
            keys.append((source, segment.get(source, 0)))
            locs.append(fd.locations[n])
    groups = {}
    for n, key in enumerate(keys):
        groups.setdefault(key, []).append(n)
    return _sample_pairs(list(groups.values()), np.asarray(locs).reshape(-1, 3), max_pairs, rng)
