"""Synthetic egocentric kitchen scenarios with full ground truth.

A camera wearer walks between stations (counters, table, shelves and
closable containers), picks objects up, carries them in front of the camera
and puts them down elsewhere.  Every frame, each visible object may emit one
lifted observation: the true point is projected into the camera, its depth is
perturbed, and the pixel is lifted back to the world.  Appearances are noisy
unit vectors around a per-object base vector that occasionally drifts when the
object is picked up.

Everything is a pure function of :class:`ScenarioConfig` (including its seed).
"""

from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ._validation import check_probability, check_scalar
from .exceptions import GenerationError, InvalidInputError
from .geometry import (
    CameraFrame,
    CameraIntrinsics,
    CameraPose,
    CameraTimeline,
    look_at,
    unproject_points,
)
from .tracker import FrameData


@dataclass(frozen=True)
class Surface:
    """A horizontal placement area; ``container`` surfaces hide their contents
    unless the wearer is standing at them (door open)."""

    name: str
    center: tuple
    size: tuple
    stand: tuple
    container: bool = False


DEFAULT_SURFACES = (
    Surface("counter_left", (0.30, 1.50, 0.90), (0.50, 1.20), (1.00, 1.50)),
    Surface("sink", (0.30, 3.80, 0.85), (0.50, 0.60), (1.00, 3.80)),
    Surface("counter_back", (2.40, 4.20, 0.90), (1.20, 0.40), (2.40, 3.50)),
    Surface("hob", (4.40, 4.20, 0.90), (0.60, 0.40), (4.40, 3.50)),
    Surface("table", (3.00, 1.60, 0.75), (1.00, 0.80), (3.00, 0.70)),
    Surface("shelf", (5.70, 2.00, 1.45), (0.25, 0.80), (5.00, 2.00)),
    Surface("cupboard", (1.40, 4.20, 0.35), (0.50, 0.40), (1.40, 3.60), container=True),
    Surface("fridge", (5.60, 0.40, 1.10), (0.40, 0.40), (4.90, 0.60), container=True),
    Surface("drawer", (0.30, 0.40, 0.80), (0.40, 0.30), (1.00, 0.50), container=True),
)

# camera-frame carry positions (x right, y down, z forward), all within
# 0.5 m of the camera and inside the default image
HAND_OFFSETS = (
    (-0.12, 0.15, 0.42),
    (0.12, 0.15, 0.42),
    (0.00, 0.20, 0.38),
)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    duration_frames: int = 6000
    frame_rate: float = 10.0
    num_objects: int = 20
    appearance_dim: int = 64
    appearance_noise_sigma: float = 0.05
    depth_noise_sigma: float = 0.02
    observation_dropout: float = 0.1
    appearance_drift_prob: float = 0.2
    drift_angle: float = 0.8
    num_categories: int = 5
    category_spread: float = 0.1
    orthogonal_appearance: bool = False
    surfaces: tuple = DEFAULT_SURFACES
    slot_spacing: float = 0.15
    start_in_containers: bool = False
    camera_height: float = 1.6
    walk_speed: float = 0.8
    dwell_seconds: tuple = (3.0, 9.0)
    hand_capacity: int = 3
    hand_offsets: tuple = HAND_OFFSETS
    place_prob: float = 0.7
    pick_prob: float = 0.6
    reach_seconds: float = 0.5
    interaction_margin_seconds: float = 1.0
    initial_overview_seconds: float = 1.0
    depth_samples_per_frame: int = 8
    raw_depth_noise_sigma: float = 0.005
    radius_range: tuple = (0.03, 0.25)
    fx: float = 300.0
    fy: float = 300.0
    cx: float = 320.0
    cy: float = 180.0
    width: int = 640
    height: int = 360

    def __post_init__(self):
        check_scalar(self.seed, "seed", min_val=0, integer=True)
        check_scalar(self.duration_frames, "duration_frames", min_val=1, integer=True)
        check_scalar(self.frame_rate, "frame_rate", min_val=0.0, include_min=False)
        check_scalar(self.num_objects, "num_objects", min_val=0, integer=True)
        check_scalar(self.appearance_dim, "appearance_dim", min_val=2, integer=True)
        check_scalar(self.appearance_noise_sigma, "appearance_noise_sigma", min_val=0.0)
        check_scalar(self.depth_noise_sigma, "depth_noise_sigma", min_val=0.0)
        for name in ("observation_dropout", "appearance_drift_prob", "place_prob", "pick_prob"):
            check_probability(getattr(self, name), name)
        check_scalar(self.hand_capacity, "hand_capacity", min_val=1,
                     max_val=len(self.hand_offsets), integer=True)
        offsets = np.asarray(self.hand_offsets, dtype=np.float64)
        if offsets.ndim != 2 or offsets.shape[1] != 3 or np.any(np.linalg.norm(offsets, axis=1) > 0.5):
            raise InvalidInputError("hand_offsets must be 3-vectors within 0.5 m of the camera")
        check_scalar(self.num_categories, "num_categories", min_val=1, integer=True)
        if len([s for s in self.surfaces]) < 2:
            raise InvalidInputError("need at least two surfaces")
        if self.orthogonal_appearance and self.num_objects > self.appearance_dim:
            raise InvalidInputError("orthogonal appearances need appearance_dim >= num_objects")
        lo, hi = self.dwell_seconds
        if not 0 < lo <= hi:
            raise InvalidInputError("dwell_seconds must be an increasing positive range")

    @property
    def intrinsics(self):
        return CameraIntrinsics(self.fx, self.fy, self.cx, self.cy, self.width, self.height)

    def to_dict(self):
        d = asdict(self)
        d["surfaces"] = [asdict(s) for s in self.surfaces]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidInputError(f"unknown scenario config keys: {sorted(unknown)}")
        if "surfaces" in d:
            d["surfaces"] = tuple(
                Surface(s["name"], tuple(s["center"]), tuple(s["size"]), tuple(s["stand"]),
                        bool(s.get("container", False)))
                for s in d["surfaces"]
            )
        for key in ("dwell_seconds", "radius_range"):
            if key in d:
                d[key] = tuple(d[key])
        if "hand_offsets" in d:
            d["hand_offsets"] = tuple(tuple(h) for h in d["hand_offsets"])
        return cls(**d)


@dataclass
class GroundTruth:
    """What the evaluator needs to know about the world, indexed ``[frame, object]``.

    ``observed`` marks frames where the object emitted an observation.
    """

    positions: np.ndarray
    in_view: np.ndarray
    visible: np.ndarray
    observed: np.ndarray
    interacting: np.ndarray
    carried: np.ndarray
    camera_centers: np.ndarray
    radii: np.ndarray
    object_ids: tuple
    frame_rate: float

    @property
    def n_frames(self):
        return self.positions.shape[0]

    @property
    def n_objects(self):
        return self.positions.shape[1]


@dataclass
class Scenario:
    """Ground truth plus the emitted observation stream.

    Arrays are indexed ``[frame, object]``.  ``in_view`` is the frustum test
    alone; ``visible`` is structural
    visibility (in view and not inside a closed container); ``observed``
    additionally applies dropout.  Observations are stored as flat columns
    ``obs_*`` sorted by (frame, object).
    """

    config: ScenarioConfig
    intrinsics: CameraIntrinsics
    camera_rotations: np.ndarray
    camera_centers: np.ndarray
    positions: np.ndarray
    in_view: np.ndarray
    visible: np.ndarray
    contained: np.ndarray
    interacting: np.ndarray
    carried: np.ndarray
    radii: np.ndarray
    initial_appearance: np.ndarray
    obs_frame: np.ndarray
    obs_object: np.ndarray
    obs_pixel: np.ndarray
    obs_depth: np.ndarray
    obs_depth_raw: np.ndarray
    obs_location: np.ndarray
    obs_appearance: np.ndarray
    obs_interaction: np.ndarray
    depth_samples: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    object_ids: tuple = None
    frame_rate: float = 10.0

    def __post_init__(self):
        if self.object_ids is None:
            self.object_ids = tuple(range(self.positions.shape[1]))
        self._frames = None

    @property
    def n_frames(self):
        return self.positions.shape[0]

    @property
    def n_objects(self):
        return self.positions.shape[1]

    @property
    def observed(self):
        out = np.zeros(self.visible.shape, dtype=bool)
        out[self.obs_frame, self.obs_object] = True
        return out

    def camera(self, t):
        return CameraFrame(CameraPose(self.camera_rotations[t], self.camera_centers[t]), self.intrinsics)

    def camera_timeline(self):
        return CameraTimeline.from_arrays(self.camera_rotations, self.camera_centers, self.intrinsics)

    def ground_truth(self):
        return GroundTruth(
            positions=self.positions, in_view=self.in_view, visible=self.visible,
            observed=self.observed, interacting=self.interacting, carried=self.carried,
            camera_centers=self.camera_centers, radii=self.radii, object_ids=self.object_ids,
            frame_rate=self.frame_rate,
        )

    def frames(self):
        """Observation stream as one :class:`FrameData` per frame."""
        if self._frames is None:
            bounds = np.searchsorted(self.obs_frame, np.arange(self.n_frames + 1))
            out = []
            for t in range(self.n_frames):
                a, b = bounds[t], bounds[t + 1]
                out.append(FrameData(
                    t, self.obs_location[a:b], self.obs_appearance[a:b],
                    source_ids=[self.object_ids[i] for i in self.obs_object[a:b]],
                    camera=self.camera(t), interactions=self.obs_interaction[a:b],
                ))
            self._frames = out
        return self._frames

    def true_location(self, object_index, t):
        return self.positions[t, object_index].copy()

    def transformed(self, rotation, translation):
        """The same scenario under the world-frame rigid motion ``x -> R x + t``."""
        rotation = np.asarray(rotation, dtype=np.float64)
        translation = np.asarray(translation, dtype=np.float64)
        moved = replace(
            self,
            camera_rotations=np.einsum("ij,tjk->tik", rotation, self.camera_rotations),
            camera_centers=self.camera_centers @ rotation.T + translation,
            positions=self.positions @ rotation.T + translation,
            obs_location=self.obs_location @ rotation.T + translation,
        )
        return moved


def true_visibility(scenario, object_index, t):
    """Structural visibility: in view and not inside a closed container."""
    return bool(scenario.visible[t, object_index])


def _slots(surface, spacing):
    cx, cy, cz = surface.center
    sx, sy = surface.size
    nx = max(1, int(np.floor(sx / spacing)) + 1) if sx >= spacing else 1
    ny = max(1, int(np.floor(sy / spacing)) + 1) if sy >= spacing else 1
    xs = cx + (np.arange(nx) - (nx - 1) / 2) * spacing if nx > 1 else np.array([cx])
    ys = cy + (np.arange(ny) - (ny - 1) / 2) * spacing if ny > 1 else np.array([cy])
    return [np.array([x, y, cz]) for x in xs for y in ys]


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _base_appearances(config, rng):
    n, dim = config.num_objects, config.appearance_dim
    if config.orthogonal_appearance:
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        return q[:, :n].T.copy()
    centers = _unit(rng.standard_normal((config.num_categories, dim)))
    category = rng.integers(config.num_categories, size=n)
    offsets = _unit(rng.standard_normal((n, dim)))
    return _unit(centers[category] + config.category_spread * offsets)


def _smooth(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3 - 2 * s)


class _Planner:
    """Camera path and pick/place activity, generated visit by visit."""

    def __init__(self, config, rng, slots, slot_surface, occupant):
        self.config = config
        self.rng = rng
        self.slots = slots
        self.slot_surface = slot_surface
        self.occupant = occupant  # slot index -> object index or -1
        self.fps = config.frame_rate
        self.T = config.duration_frames
        self.eyes = np.zeros((self.T, 3))
        self.targets = np.zeros((self.T, 3))
        self.open_surface = np.full(self.T, -1)
        self.events = []  # (frame, kind, object, slot, hand)

    def sec(self, s):
        return max(1, int(round(s * self.fps)))

    def station(self, k):
        s = self.config.surfaces[k]
        eye = np.array([s.stand[0], s.stand[1], self.config.camera_height])
        return eye, np.array(s.center, dtype=np.float64)

    def run(self, overview_eye=None, overview_frames=0):
        cfg, rng = self.config, self.rng
        n_surf = len(cfg.surfaces)
        t = 0
        if overview_frames:
            end = min(self.T, overview_frames)
            self.eyes[:end] = overview_eye
            self.targets[:end] = overview_eye - np.array([0.0, 0.0, 1.0])
            t = end
        current = int(rng.integers(n_surf))
        carrying = []  # list of (object, hand)
        while t < self.T:
            # dwell at `current`
            eye, target = self.station(current)
            dwell = self.sec(rng.uniform(*cfg.dwell_seconds))
            plan, carrying = self._plan_visit(current, t, carrying)
            needed = (plan[-1][0] - t + self.sec(cfg.reach_seconds) + self.sec(0.5)) if plan else 0
            dwell = max(dwell, needed)
            end = min(self.T, t + dwell)
            ts = np.arange(t, end)
            phase = rng.uniform(0, 2 * np.pi)
            jitter = np.column_stack([
                0.06 * np.sin(0.9 * ts / self.fps + phase),
                0.06 * np.cos(0.7 * ts / self.fps + phase),
                np.zeros(ts.size),
            ])
            self.eyes[t:end] = eye
            self.targets[t:end] = target + jitter
            if cfg.surfaces[current].container:
                self.open_surface[t:end] = current
            self.events.extend(e for e in plan if e[0] < self.T)
            t = end
            if t >= self.T:
                break
            # walk to the next station
            nxt = int(rng.integers(n_surf - 1))
            nxt = nxt if nxt < current else nxt + 1
            eye2, target2 = self.station(nxt)
            dist = np.linalg.norm(eye2 - eye)
            walk = self.sec(max(1.0, dist / cfg.walk_speed))
            end = min(self.T, t + walk)
            s = (np.arange(t, end) - t + 1) / walk
            w = _smooth(s)[:, None]
            self.eyes[t:end] = eye + w * (eye2 - eye)
            # look ahead along the walk in the middle, at the stations at the ends
            heading = eye2 - eye
            heading[2] = 0.0
            heading = heading / max(np.linalg.norm(heading), 1e-9)
            ahead = self.eyes[t:end] + 0.8 * heading
            ahead[:, 2] = 0.0  # eyes on the floor ahead
            first = _smooth(4 * s)[:, None]
            second = _smooth(4 * s - 3)[:, None]
            gaze = np.where(s[:, None] < 0.5,
                            target + first * (ahead - target),
                            ahead + second * (target2 - ahead))
            self.targets[t:end] = gaze
            t = end
            current = nxt
        return self.events

    def _plan_visit(self, surface, t0, carrying):
        cfg, rng = self.config, self.rng
        gap = self.sec(0.8)
        t = t0 + self.sec(0.5)
        plan = []
        free_slots = [i for i in range(len(self.slots))
                      if self.slot_surface[i] == surface and self.occupant[i] < 0]
        still = []
        for obj, hand in carrying:
            if free_slots and rng.random() < cfg.place_prob:
                k = int(rng.integers(len(free_slots)))
                slot = free_slots.pop(k)
                self.occupant[slot] = obj
                plan.append((t, "place", obj, slot, hand))
                t += gap
            else:
                still.append((obj, hand))
        used = {h for _, h in still}
        free_hands = [h for h in range(cfg.hand_capacity) if h not in used]
        here = [i for i in range(len(self.slots))
                if self.slot_surface[i] == surface and self.occupant[i] >= 0
                and not any(e[3] == i and e[1] == "place" for e in plan)]
        rng.shuffle(here)
        for slot in here:
            if not free_hands:
                break
            if rng.random() < cfg.pick_prob:
                obj = int(self.occupant[slot])
                hand = free_hands.pop(int(rng.integers(len(free_hands))))
                self.occupant[slot] = -1
                plan.append((t, "pick", obj, slot, hand))
                still.append((obj, hand))
                t += gap
        return plan, still


def generate(config):
    """Generate a :class:`Scenario` from ``config`` (deterministic in the seed)."""
    if not isinstance(config, ScenarioConfig):
        raise InvalidInputError("generate() needs a ScenarioConfig")
    rng = np.random.default_rng(config.seed)
    cfg = config
    T, N = cfg.duration_frames, cfg.num_objects
    intr = cfg.intrinsics

    slots, slot_surface = [], []
    for k, surf in enumerate(cfg.surfaces):
        for p in _slots(surf, cfg.slot_spacing):
            slots.append(p)
            slot_surface.append(k)
    slots = np.array(slots)
    slot_surface = np.array(slot_surface)
    allowed = np.flatnonzero([cfg.start_in_containers or not cfg.surfaces[s].container
                              for s in slot_surface])
    if N > allowed.size:
        raise GenerationError(f"{N} objects do not fit in {allowed.size} surface slots")
    occupant = np.full(len(slots), -1)
    start_slots = rng.choice(allowed, size=N, replace=False)
    occupant[start_slots] = np.arange(N)

    base = _base_appearances(cfg, rng)
    radii = rng.uniform(*cfg.radius_range, size=N)

    overview_frames = int(round(cfg.initial_overview_seconds * cfg.frame_rate))
    overview_eye = None
    if overview_frames:
        pts = slots[start_slots]
        mid = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
        need = max(np.max(np.abs(pts[:, 0] - mid[0])) * cfg.fx / (0.9 * cfg.cx),
                   np.max(np.abs(pts[:, 1] - mid[1])) * cfg.fy / (0.9 * cfg.cy))
        overview_eye = np.array([mid[0], mid[1], pts[:, 2].max() + need + 0.2])

    planner = _Planner(cfg, rng, slots, slot_surface, occupant.copy())
    events = planner.run(overview_eye, overview_frames)

    # camera poses; during the overview the camera looks straight down with
    # image x along world x
    rotations = np.zeros((T, 3, 3))
    for t in range(T):
        if t < overview_frames:
            rotations[t] = np.diag([1.0, -1.0, -1.0])
        else:
            rotations[t] = look_at(planner.eyes[t], planner.targets[t]).rotation
    centers = planner.eyes.copy()

    # object trajectories
    reach = max(1, int(round(cfg.reach_seconds * cfg.frame_rate)))
    hand_offsets = np.asarray(cfg.hand_offsets, dtype=np.float64)
    margin = int(round(cfg.interaction_margin_seconds * cfg.frame_rate))
    by_frame = {}
    for ev in events:
        by_frame.setdefault(ev[0], []).append(ev)
    positions = np.zeros((T, N, 3))
    carried = np.zeros((T, N), dtype=bool)
    in_slot = start_slots.copy()
    hand_of = np.full(N, -1)
    moving = {}  # object -> (start_frame, from_point or None, to_slot or None, hand)
    interact_spans = []
    pick_frame = {}
    drift_events = []  # (frame, object, new_base)
    bases = [[(0, base[i].copy())] for i in range(N)]
    for t in range(T):
        for _, kind, obj, slot, hand in sorted(by_frame.get(t, []), key=lambda e: (e[1], e[2])):
            if kind == "pick":
                moving[obj] = (t, slots[slot], None, hand)
                hand_of[obj] = hand
                in_slot[obj] = -1
                pick_frame[obj] = t
                if rng.random() < cfg.appearance_drift_prob:
                    old = bases[obj][-1][1]
                    u = rng.standard_normal(cfg.appearance_dim)
                    u -= u.dot(old) * old
                    u /= np.linalg.norm(u)
                    new = np.cos(cfg.drift_angle) * old + np.sin(cfg.drift_angle) * u
                    new /= np.linalg.norm(new)
                    bases[obj].append((t, new))
                    drift_events.append((t, obj))
            else:
                moving[obj] = (t, None, slot, hand)
                interact_spans.append((obj, pick_frame.pop(obj, 0), t + reach))
        hand_pts = centers[t] + hand_offsets @ rotations[t].T
        for i in range(N):
            if in_slot[i] >= 0 and i not in moving:
                positions[t, i] = slots[in_slot[i]]
                continue
            state = moving.get(i)
            if state is None:
                positions[t, i] = hand_pts[hand_of[i]]
                carried[t, i] = True
                continue
            start, src, dst, hand = state
            s = _smooth((t - start + 1) / reach)
            if dst is None:  # picking: surface -> hand
                positions[t, i] = src + s * (hand_pts[hand] - src)
                carried[t, i] = True
            else:  # placing: hand -> surface
                positions[t, i] = hand_pts[hand] + s * (slots[dst] - hand_pts[hand])
                carried[t, i] = s < 1.0
            if t - start + 1 >= reach:
                del moving[i]
                if dst is not None:
                    in_slot[i] = dst
                    hand_of[i] = -1
    for obj, start in pick_frame.items():
        interact_spans.append((obj, start, T))
    interacting = np.zeros((T, N), dtype=bool)
    for obj, a, b in interact_spans:
        interacting[max(0, a - margin):min(T, b + margin), obj] = True

    contained = np.zeros((T, N), dtype=bool)
    container_slot = np.array([cfg.surfaces[s].container for s in slot_surface])
    # recompute slot membership from the event log for containment
    where = np.full((T, N), -1)
    cur = start_slots.copy()
    for t in range(T):
        for _, kind, obj, slot, _h in by_frame.get(t, []):
            cur[obj] = -1 if kind == "pick" else slot
        where[t] = cur
    placed = where >= 0
    closed = np.ones((T, len(cfg.surfaces)), dtype=bool)
    opened = planner.open_surface >= 0
    closed[np.flatnonzero(opened), planner.open_surface[opened]] = False
    surf_idx = np.where(placed, slot_surface[np.maximum(where, 0)], 0)
    contained = placed & container_slot[np.maximum(where, 0)] & closed[np.arange(T)[:, None], surf_idx]
    # objects still mid-placement are not inside yet
    contained &= ~carried

    # visibility
    timeline = CameraTimeline.from_arrays(rotations, centers, intr)
    frames_rep = np.repeat(np.arange(T), N)
    in_view = timeline.visible(positions.reshape(-1, 3), frames_rep).reshape(T, N)
    visible = in_view & ~contained

    # observations
    keep = visible & (rng.random((T, N)) >= cfg.observation_dropout)
    obs_t, obs_i = np.nonzero(keep)
    pts = positions[obs_t, obs_i]
    p_cam = np.einsum("nji,nj->ni", rotations[obs_t], pts - centers[obs_t])
    z = p_cam[:, 2]
    pixel = np.column_stack([cfg.cx + cfg.fx * p_cam[:, 0] / z, cfg.cy + cfg.fy * p_cam[:, 1] / z])
    depth = z + cfg.depth_noise_sigma * rng.standard_normal(z.shape) if cfg.depth_noise_sigma else z.copy()
    depth = np.maximum(depth, 0.05)
    # lift frame by frame through the same routine a log reader uses
    location = np.zeros((obs_t.size, 3))
    bounds = np.searchsorted(obs_t, np.arange(T + 1))
    for t in np.flatnonzero(np.diff(bounds)):
        a, b = bounds[t], bounds[t + 1]
        location[a:b] = unproject_points(pixel[a:b], depth[a:b], intr, CameraPose(rotations[t], centers[t]))

    appearance = np.zeros((obs_t.size, cfg.appearance_dim))
    for i in range(N):
        sel = np.flatnonzero(obs_i == i)
        if not sel.size:
            continue
        starts = np.array([f for f, _ in bases[i]])
        vecs = np.array([v for _, v in bases[i]])
        idx = np.searchsorted(starts, obs_t[sel], side="right") - 1
        appearance[sel] = vecs[idx]
    if cfg.appearance_noise_sigma:
        appearance = _unit(appearance + cfg.appearance_noise_sigma * rng.standard_normal(appearance.shape))

    # monocular depth is only known up to a per-frame scale and shift
    scale = rng.uniform(0.5, 2.0, size=T)
    shift = rng.uniform(-0.3, 0.3, size=T)
    depth_raw = (depth - shift[obs_t]) / scale[obs_t]
    samples = {}
    k = cfg.depth_samples_per_frame
    if k:
        ref = rng.uniform(0.4, 4.0, size=(T, k))
        est = (ref - shift[:, None]) / scale[:, None] + cfg.raw_depth_noise_sigma * rng.standard_normal((T, k))
        samples = {t: np.column_stack([est[t], ref[t]]) for t in range(T)}

    ev_list = [(int(f), kind, int(o), int(s)) for f, kind, o, s, _ in events]
    ev_list += [(int(f), "drift", int(o), -1) for f, o in drift_events]
    ev_list.sort()
    return Scenario(
        config=cfg, intrinsics=intr, camera_rotations=rotations, camera_centers=centers,
        positions=positions, in_view=in_view, visible=visible, contained=contained, interacting=interacting,
        carried=carried, radii=radii, initial_appearance=base,
        obs_frame=obs_t.astype(np.int64), obs_object=obs_i.astype(np.int64), obs_pixel=pixel,
        obs_depth=depth, obs_depth_raw=depth_raw, obs_location=location,
        obs_appearance=appearance, obs_interaction=interacting[obs_t, obs_i],
        depth_samples=samples, events=ev_list, frame_rate=cfg.frame_rate,
    )


def identifiable_config(seed=0, **overrides):
    """Noiseless scenario in which every object is identifiable: zero noise
    and dropout, orthogonal appearances, placement slots 1 m apart, and an
    opening overview that shows every object so all tracks start together."""
    params = dict(
        seed=seed, duration_frames=3000, num_objects=6, appearance_noise_sigma=0.0,
        depth_noise_sigma=0.0, observation_dropout=0.0, appearance_drift_prob=0.0,
        orthogonal_appearance=True, slot_spacing=1.0, start_in_containers=False,
        initial_overview_seconds=1.0,
        surfaces=tuple(s for s in DEFAULT_SURFACES if not s.container),
    )
    params.update(overrides)
    return ScenarioConfig(**params)
