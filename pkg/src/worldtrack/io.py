"""Observation logs, ground-truth files, tracking results and reports.

The observation log is line-delimited JSON.  The first line is a header::

    {"format": "worldtrack-log", "version": "1", "appearance_dim": 64,
     "intrinsics": {...}, "frame_rate": 10.0, "units": "meters", "n_frames": T}

followed by records sorted by frame:

* ``{"type": "camera", "frame": t, "pose": [12 numbers]}``
* ``{"type": "depth_samples", "frame": t, "pairs": [[estimated, reference], ...]}``
* ``{"type": "obs", "frame": t, "pose": [12 numbers], "pixel": [u, v],
  "depth_raw": d, "depth_aligned": d, "appearance": [...], "source_id": id,
  "interaction": bool}``

Poses are 12 numbers: the row-major camera-to-world rotation then the
translation.  ``pose`` on an observation, ``depth_aligned``, ``source_id`` and
``interaction`` are optional.  Floats are written with ``repr`` so a log
round-trips exactly.
"""

import csv
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, InvalidInputError, LogParseError
from .geometry import CameraFrame, CameraIntrinsics, CameraPose, CameraTimeline, align_depth, unproject_points
from .simulator import GroundTruth
from .tracker import FrameData, TrackingResult

logger = logging.getLogger(__name__)

LOG_FORMAT = "worldtrack-log"
LOG_VERSION = "1"


def _dumps(obj):
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _floats(a):
    return [float(x) for x in np.asarray(a, dtype=np.float64).reshape(-1)]


def _id_key(source):
    return (0, source, "") if isinstance(source, int) else (1, 0, str(source))


@dataclass
class ObservationLog:
    """In-memory observation log; columns ``obs_*`` are sorted by frame."""

    intrinsics: CameraIntrinsics
    frame_rate: float
    appearance_dim: int
    n_frames: int
    cameras: dict  # frame -> CameraPose
    obs_frame: np.ndarray
    obs_pixel: np.ndarray
    obs_depth_raw: np.ndarray
    obs_depth_aligned: np.ndarray  # NaN where absent
    obs_appearance: np.ndarray
    obs_source: list
    obs_interaction: np.ndarray
    obs_pose: list = None  # per-observation pose flag (True when written on the record)
    depth_samples: dict = field(default_factory=dict)
    extra_header: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.obs_pose is None:
            self.obs_pose = [False] * len(self.obs_source)
        self._frames = None

    # -- construction -------------------------------------------------------
    @classmethod
    def from_scenario(cls, scenario, include_aligned=True, include_samples=True):
        cfg = scenario.config
        cameras = {t: CameraPose(scenario.camera_rotations[t], scenario.camera_centers[t])
                   for t in range(scenario.n_frames)}
        n = scenario.obs_frame.size
        return cls(
            intrinsics=scenario.intrinsics, frame_rate=scenario.frame_rate,
            appearance_dim=cfg.appearance_dim, n_frames=scenario.n_frames, cameras=cameras,
            obs_frame=scenario.obs_frame.copy(), obs_pixel=scenario.obs_pixel.copy(),
            obs_depth_raw=scenario.obs_depth_raw.copy(),
            obs_depth_aligned=scenario.obs_depth.copy() if include_aligned else np.full(n, np.nan),
            obs_appearance=scenario.obs_appearance.copy(),
            obs_source=[scenario.object_ids[i] for i in scenario.obs_object],
            obs_interaction=scenario.obs_interaction.copy(),
            depth_samples=dict(scenario.depth_samples) if include_samples else {},
            extra_header={"scenario_seed": cfg.seed},
        )

    def __len__(self):
        return len(self.obs_source)

    # -- derived streams ----------------------------------------------------
    def depths(self):
        """Metric depth per observation: the aligned value when present,
        otherwise the raw value after a per-frame scale/shift fit to the
        frame's depth samples, otherwise the raw value as is."""
        out = self.obs_depth_aligned.copy()
        missing = np.isnan(out)
        fits = {}
        for n in np.flatnonzero(missing):
            t = int(self.obs_frame[n])
            if t in self.depth_samples and len(self.depth_samples[t]) >= 2:
                if t not in fits:
                    pairs = np.asarray(self.depth_samples[t])
                    fits[t] = align_depth(pairs)
                scale, shift = fits[t]
                out[n] = scale * self.obs_depth_raw[n] + shift
            else:
                out[n] = self.obs_depth_raw[n]
        return out

    def frames(self):
        """One :class:`FrameData` per frame, lifted to world coordinates."""
        if self._frames is not None:
            return self._frames
        depths = self.depths()
        bounds = np.searchsorted(self.obs_frame, np.arange(self.n_frames + 1))
        out = []
        for t in range(self.n_frames):
            a, b = int(bounds[t]), int(bounds[t + 1])
            pose = self.cameras.get(t)
            camera = CameraFrame(pose, self.intrinsics) if pose is not None else None
            if b > a:
                if pose is None:
                    raise InvalidInputError(f"frame {t} has observations but no camera pose")
                locs = unproject_points(self.obs_pixel[a:b], depths[a:b], self.intrinsics, pose)
            else:
                locs = np.zeros((0, 3))
            out.append(FrameData(t, locs, self.obs_appearance[a:b].reshape(b - a, self.appearance_dim),
                                 source_ids=list(self.obs_source[a:b]), camera=camera,
                                 interactions=self.obs_interaction[a:b]))
        self._frames = out
        return out

    def camera_timeline(self):
        return CameraTimeline({t: CameraFrame(p, self.intrinsics) for t, p in self.cameras.items()},
                              self.n_frames)

    def with_appearances(self, appearances):
        """Copy with the appearance column replaced (e.g. shuffled)."""
        out = ObservationLog(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        out.obs_appearance = np.asarray(appearances, dtype=np.float64)
        return out

    def lifted_ground_truth(self):
        """Ground truth built from the log itself: each source's observed
        locations carried forward between sightings and back-filled before
        the first one, for logs without true trajectories."""
        frames = self.frames()
        ids = sorted(set(self.obs_source), key=_id_key)
        index = {s: i for i, s in enumerate(ids)}
        T, N = self.n_frames, len(ids)
        positions = np.full((T, N, 3), np.nan)
        observed = np.zeros((T, N), dtype=bool)
        interacting = np.zeros((T, N), dtype=bool)
        for fd in frames:
            for n, s in enumerate(fd.source_ids or []):
                i = index[s]
                positions[fd.frame, i] = fd.locations[n]
                observed[fd.frame, i] = True
                interacting[fd.frame, i] = bool(fd.interactions[n])
        for i in range(N):
            seen = np.flatnonzero(observed[:, i])
            idx = np.searchsorted(seen, np.arange(T), side="right") - 1
            positions[:, i] = positions[seen[np.maximum(idx, 0)], i]
        timeline = self.camera_timeline()
        in_view = timeline.visible(positions.reshape(-1, 3), np.repeat(np.arange(T), N)).reshape(T, N)
        return GroundTruth(
            positions=positions, in_view=in_view, visible=in_view | observed, observed=observed,
            interacting=interacting, carried=np.zeros((T, N), dtype=bool),
            camera_centers=timeline.centers, radii=np.full(N, np.nan), object_ids=tuple(ids),
            frame_rate=self.frame_rate,
        )

    # -- serialisation ------------------------------------------------------
    def header(self):
        h = {
            "format": LOG_FORMAT, "version": LOG_VERSION, "appearance_dim": int(self.appearance_dim),
            "intrinsics": self.intrinsics.to_dict(), "frame_rate": float(self.frame_rate),
            "units": "meters", "n_frames": int(self.n_frames),
        }
        h.update(self.extra_header)
        return h

    def lines(self):
        yield _dumps(self.header())
        bounds = np.searchsorted(self.obs_frame, np.arange(self.n_frames + 1))
        for t in range(self.n_frames):
            if t in self.cameras:
                yield _dumps({"type": "camera", "frame": t, "pose": _floats(self.cameras[t].flat())})
            if t in self.depth_samples:
                pairs = np.asarray(self.depth_samples[t], dtype=np.float64)
                yield _dumps({"type": "depth_samples", "frame": t,
                              "pairs": [_floats(p) for p in pairs]})
            for n in range(int(bounds[t]), int(bounds[t + 1])):
                rec = {"type": "obs", "frame": t}
                if self.obs_pose[n]:
                    rec["pose"] = _floats(self.cameras[t].flat())
                rec["pixel"] = _floats(self.obs_pixel[n])
                rec["depth_raw"] = float(self.obs_depth_raw[n])
                if not np.isnan(self.obs_depth_aligned[n]):
                    rec["depth_aligned"] = float(self.obs_depth_aligned[n])
                rec["appearance"] = _floats(self.obs_appearance[n])
                if self.obs_source[n] is not None:
                    rec["source_id"] = self.obs_source[n]
                rec["interaction"] = bool(self.obs_interaction[n])
                yield _dumps(rec)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.lines():
                fh.write(line)
                fh.write("\n")


def _require(rec, key, lineno, kind=None):
    if key not in rec:
        raise LogParseError(lineno, f"record is missing {key!r}")
    value = rec[key]
    if kind is not None and not isinstance(value, kind):
        raise LogParseError(lineno, f"{key!r} has the wrong type")
    return value


def _number_list(rec, key, length, lineno):
    value = _require(rec, key, lineno, list)
    if length is not None and len(value) != length:
        raise LogParseError(lineno, f"{key!r} must have {length} numbers, got {len(value)}")
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise LogParseError(lineno, f"{key!r} must contain numbers") from None
    if not np.all(np.isfinite(arr)):
        raise LogParseError(lineno, f"{key!r} contains non-finite values")
    return arr


def _pose(values, lineno):
    try:
        return CameraPose.from_flat(values)
    except InvalidInputError as exc:
        raise LogParseError(lineno, f"invalid pose: {exc}") from None


def ingest_log(path):
    """Read an observation log.  Errors name the offending line."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise LogParseError(1, "empty file: missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LogParseError(1, f"header is not JSON: {exc.msg}") from None
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT:
        raise LogParseError(1, f"not a {LOG_FORMAT} file")
    if "version" not in header:
        raise LogParseError(1, "header has no version")
    if str(header["version"]) != LOG_VERSION:
        raise LogParseError(1, f"unsupported version {header['version']!r}")
    if header.get("units", "meters") != "meters":
        raise LogParseError(1, "only metric units are supported")
    try:
        dim = int(header["appearance_dim"])
        intrinsics = CameraIntrinsics.from_dict(header["intrinsics"])
        frame_rate = float(header["frame_rate"])
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        raise LogParseError(1, f"bad header: {exc}") from None
    known = {"format", "version", "appearance_dim", "intrinsics", "frame_rate", "units", "n_frames"}
    extra = {k: v for k, v in header.items() if k not in known}

    cameras, samples = {}, {}
    frames, pixels, raws, aligned, apps, sources, inter, has_pose = [], [], [], [], [], [], [], []
    seen = set()
    last = -1
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogParseError(lineno, f"not JSON: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise LogParseError(lineno, "record must be an object")
        kind = _require(rec, "type", lineno, str)
        t = _require(rec, "frame", lineno)
        if isinstance(t, bool) or not isinstance(t, int) or t < 0:
            raise LogParseError(lineno, "frame must be a non-negative integer")
        if t < last:
            raise LogParseError(lineno, f"records must be sorted by frame ({t} after {last})")
        last = t
        if kind == "camera":
            cameras[t] = _pose(_number_list(rec, "pose", 12, lineno), lineno)
        elif kind == "depth_samples":
            pairs = np.asarray(rec.get("pairs", []), dtype=np.float64)
            if pairs.size and (pairs.ndim != 2 or pairs.shape[1] != 2):
                raise LogParseError(lineno, "pairs must be [estimated, reference] lists")
            samples[t] = pairs.reshape(-1, 2)
        elif kind == "obs":
            app = _number_list(rec, "appearance", None, lineno)
            if app.size != dim:
                raise ConfigError(f"line {lineno}: appearance dimension mismatch: expected {dim}, got {app.size}")
            source = rec.get("source_id")
            if source is not None and (t, source) in seen:
                logger.warning("line %d: duplicate observation of %r at frame %d, keeping the first",
                               lineno, source, t)
                continue
            seen.add((t, source))
            if "pose" in rec:
                pose = _pose(_number_list(rec, "pose", 12, lineno), lineno)
                if t in cameras and cameras[t] != pose:
                    raise LogParseError(lineno, f"observation pose disagrees with the camera at frame {t}")
                cameras[t] = pose
            pixel = _number_list(rec, "pixel", 2, lineno)
            raw = rec.get("depth_raw")
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise LogParseError(lineno, "depth_raw must be a number")
            al = rec.get("depth_aligned")
            if al is not None and (isinstance(al, bool) or not isinstance(al, (int, float))):
                raise LogParseError(lineno, "depth_aligned must be a number")
            frames.append(t)
            pixels.append(pixel)
            raws.append(float(raw))
            aligned.append(np.nan if al is None else float(al))
            apps.append(app)
            sources.append(source)
            inter.append(bool(rec.get("interaction", False)))
            has_pose.append("pose" in rec)
        else:
            raise LogParseError(lineno, f"unknown record type {kind!r}")
    n_frames = int(header.get("n_frames", last + 1))
    observed_frames = set(frames)
    missing = sorted(f for f in observed_frames if f not in cameras)
    if missing:
        raise InvalidInputError(f"frame {missing[0]} has observations but no camera pose")
    log = ObservationLog(
        intrinsics=intrinsics, frame_rate=frame_rate, appearance_dim=dim,
        n_frames=max(n_frames, last + 1),
        cameras=cameras, obs_frame=np.array(frames, dtype=np.int64),
        obs_pixel=np.array(pixels, dtype=np.float64).reshape(-1, 2),
        obs_depth_raw=np.array(raws, dtype=np.float64),
        obs_depth_aligned=np.array(aligned, dtype=np.float64),
        obs_appearance=np.array(apps, dtype=np.float64).reshape(-1, dim),
        obs_source=sources, obs_interaction=np.array(inter, dtype=bool), obs_pose=has_pose,
        depth_samples=samples, extra_header=extra,
    )
    return log


def write_log(scenario, path, include_aligned=True, include_samples=True):
    ObservationLog.from_scenario(scenario, include_aligned, include_samples).write(path)


# -- ground truth -------------------------------------------------------------

_GT_ARRAYS = ("positions", "in_view", "visible", "observed", "interacting", "carried",
              "camera_centers", "radii")


def save_ground_truth(truth, path):
    arrays = {k: np.asarray(getattr(truth, k)) for k in _GT_ARRAYS}
    meta = json.dumps({"object_ids": list(truth.object_ids), "frame_rate": truth.frame_rate})
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(meta), **arrays)


def load_ground_truth(path):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        arrays = {k: data[k] for k in _GT_ARRAYS}
    return GroundTruth(object_ids=tuple(meta["object_ids"]), frame_rate=float(meta["frame_rate"]),
                       **arrays)


# -- tracking results ---------------------------------------------------------

def result_to_dict(result):
    return {
        "method": result.method, "mode": result.mode, "params": result.params,
        "last_frame": result.last_frame,
        "tracks": [
            {"id": j, "frames": result.track_frames[j].tolist(),
             "locations": result.track_locations[j].tolist(),
             "lost": [[s, e] for s, e in result.lost[j]]}
            for j in range(result.n_tracks)
        ],
        "assignments": {
            "frame": result.assign_frames.tolist(), "obs": result.assign_obs.tolist(),
            "source_id": list(result.assign_sources), "track": result.assign_tracks.tolist(),
            "new": result.assign_new.tolist(),
        },
    }


def result_from_dict(d):
    tracks = d["tracks"]
    a = d["assignments"]
    return TrackingResult(
        d["method"], d["mode"], d.get("params", {}), d["last_frame"],
        [t["frames"] for t in tracks], [t["locations"] for t in tracks],
        [[(s, e) for s, e in t["lost"]] for t in tracks],
        a["frame"], a["obs"], a["source_id"], a["track"], a["new"],
    )


def save_result(result, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result_to_dict(result), fh, separators=(",", ":"), allow_nan=False)
        fh.write("\n")


def load_result(path):
    with open(path, encoding="utf-8") as fh:
        return result_from_dict(json.load(fh))


def write_timeline_csv(result, path):
    """Per-track change points: one row per (track, frame) where the location changes."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["track_id", "frame", "x", "y", "z"])
        for j in range(result.n_tracks):
            for f, loc in zip(result.track_frames[j].tolist(), result.track_locations[j].tolist()):
                w.writerow([j, f, repr(loc[0]), repr(loc[1]), repr(loc[2])])


# -- reports ------------------------------------------------------------------

REPORT_COLUMNS = ("method", "mode", "delta_seconds", "radius_m", "pcl_mean", "pcl_std",
                  "n_keyframes", "n_objects")
STATE_COLUMNS = ("method", "mode", "delta_seconds", "radius_m", "visibility", "reach", "n",
                 "correct", "pcl")
MOTION_COLUMNS = ("method", "mode", "delta_seconds", "radius_m", "motion", "n", "correct", "pcl")
SCENARIO_COLUMNS = ("method", "mode", "scenario", "delta_seconds", "radius_m", "pcl_mean",
                    "n_keyframes")


def _cell(v):
    if isinstance(v, float):
        return "nan" if np.isnan(v) else repr(v)
    return str(v)


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def write_csv(rows, columns, path, params=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for k, v in sorted(_flatten(params or {}).items()):
            fh.write(f"# {k}={json.dumps(v, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])


def write_report(report, prefix):
    """Write ``prefix.csv`` plus ``_states``, ``_motion`` and ``_scenarios``
    sibling tables and ``prefix.json``; returns the paths written."""
    paths = {
        "report": f"{prefix}.csv", "states": f"{prefix}_states.csv",
        "motion": f"{prefix}_motion.csv", "scenarios": f"{prefix}_scenarios.csv",
        "json": f"{prefix}.json",
    }
    write_csv(report.rows, REPORT_COLUMNS, paths["report"], report.params)
    write_csv(report.states, STATE_COLUMNS, paths["states"], report.params)
    write_csv(report.motion, MOTION_COLUMNS, paths["motion"], report.params)
    write_csv(report.scenarios, SCENARIO_COLUMNS, paths["scenarios"], report.params)

    def clean(rows):
        return [{k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in r.items()}
                for r in rows]

    payload = {"params": report.params, "rows": clean(report.rows), "states": clean(report.states),
               "motion": clean(report.motion), "scenarios": clean(report.scenarios)}
    if report.projection is not None:
        payload["projection"] = report.projection
    with open(paths["json"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return paths
