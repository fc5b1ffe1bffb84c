"""Pinhole camera model: lifting pixels to world points and back.

Conventions: the camera looks down +Z of its own frame with +X right and +Y
down the image.  ``CameraPose`` stores the camera-to-world transform, so a
camera-frame point ``p`` maps to ``rotation @ p + translation`` and
``translation`` is the camera center in world coordinates.  Units are meters.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_point, check_points
from .exceptions import DegenerateFitError, InvalidInputError

_ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidInputError(f"focal lengths must be positive, got {self.fx}, {self.fy}")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise InvalidInputError("principal point must lie strictly inside the image")

    @property
    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def to_dict(self):
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
                "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["fx"]), float(d["fy"]), float(d["cx"]), float(d["cy"]),
                   int(d["width"]), int(d["height"]))


class CameraPose:
    """Rigid camera-to-world transform."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation):
        rotation = np.array(rotation, dtype=np.float64)
        translation = np.array(translation, dtype=np.float64).reshape(-1)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise InvalidInputError("pose needs a 3x3 rotation and a 3-vector translation")
        if not (np.all(np.isfinite(rotation)) and np.all(np.isfinite(translation))):
            raise InvalidInputError("pose contains non-finite values")
        if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > _ORTHO_TOL:
            raise InvalidInputError("rotation is not orthonormal")
        if abs(np.linalg.det(rotation) - 1.0) > _ORTHO_TOL:
            raise InvalidInputError("rotation must have determinant +1")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    def __setattr__(self, name, value):
        raise AttributeError("CameraPose is immutable")

    def __repr__(self):
        return f"CameraPose(rotation={self.rotation.tolist()}, translation={self.translation.tolist()})"

    def __eq__(self, other):
        return (isinstance(other, CameraPose)
                and np.array_equal(self.rotation, other.rotation)
                and np.array_equal(self.translation, other.translation))

    __hash__ = None

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @property
    def center(self):
        return self.translation

    def as_matrix(self):
        """4x4 homogeneous camera-to-world matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def to_world(self, points_cam):
        return points_cam @ self.rotation.T + self.translation

    def to_camera(self, points_world):
        return (points_world - self.translation) @ self.rotation

    def compose(self, rotation, translation):
        """Pose after applying the world-frame rigid motion ``x -> R x + t``."""
        rotation = np.asarray(rotation, dtype=np.float64)
        return CameraPose(rotation @ self.rotation, rotation @ self.translation + translation)

    def flat(self):
        """12 numbers: row-major rotation followed by translation."""
        return self.rotation.reshape(-1).tolist() + self.translation.tolist()

    @classmethod
    def from_flat(cls, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (12,):
            raise InvalidInputError(f"pose needs 12 numbers, got {values.size}")
        return cls(values[:9].reshape(3, 3), values[9:])


@dataclass(frozen=True)
class CameraFrame:
    """Camera geometry at one time step."""

    pose: CameraPose
    intrinsics: CameraIntrinsics


class DepthSamplePair(NamedTuple):
    estimated: float
    reference: float


def look_at(eye, target, up=(0.0, 0.0, 1.0)):
    """Camera pose at ``eye`` whose optical axis points at ``target``."""
    eye = np.asarray(eye, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - eye
    forward /= np.linalg.norm(forward)
    right = np.cross(forward, np.asarray(up, dtype=np.float64))
    norm = np.linalg.norm(right)
    if norm < 1e-9:
        # looking straight along `up`; pick any perpendicular
        right = np.cross(forward, np.array([0.0, 1.0, 0.0]))
        norm = np.linalg.norm(right)
    right /= norm
    down = np.cross(forward, right)
    rotation = np.column_stack([right, down, forward])
    # re-orthonormalise so the pose survives the 1e-9 checks after many ops
    u, _, vt = np.linalg.svd(rotation)
    return CameraPose(u @ vt, eye)


def rotation_about_axis(axis, angle):
    """Rodrigues rotation matrix."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def unproject(pixel, depth, intrinsics, pose):
    """Lift a pixel at camera-frame depth ``depth`` to a world point."""
    u, v = (float(c) for c in pixel)
    if not (np.isfinite(u) and np.isfinite(v)):
        raise InvalidInputError("pixel must be finite")
    if not np.isfinite(depth) or depth <= 0:
        raise InvalidInputError(f"depth must be positive and finite, got {depth!r}")
    k = intrinsics
    p_cam = np.array([depth * (u - k.cx) / k.fx, depth * (v - k.cy) / k.fy, depth])
    return pose.rotation @ p_cam + pose.translation


def unproject_points(pixels, depths, intrinsics, pose):
    """Vectorised :func:`unproject` for arrays of shape (n, 2) and (n,)."""
    pixels = check_points(pixels, "pixels", dim=2)
    depths = np.asarray(depths, dtype=np.float64).reshape(-1)
    if depths.shape[0] != pixels.shape[0]:
        raise InvalidInputError("pixels and depths differ in length")
    if not np.all(np.isfinite(depths)) or np.any(depths <= 0):
        raise InvalidInputError("depths must be positive and finite")
    k = intrinsics
    p_cam = np.column_stack([
        depths * (pixels[:, 0] - k.cx) / k.fx,
        depths * (pixels[:, 1] - k.cy) / k.fy,
        depths,
    ])
    return pose.to_world(p_cam)


def project(point, intrinsics, pose):
    """Return ``(pixel, depth)``; ``depth <= 0`` means behind the camera."""
    point = check_point(point)
    p_cam = pose.rotation.T @ (point - pose.translation)
    z = p_cam[2]
    k = intrinsics
    with np.errstate(divide="ignore", invalid="ignore"):
        u = k.cx + k.fx * p_cam[0] / z
        v = k.cy + k.fy * p_cam[1] / z
    return np.array([u, v]), float(z)


def project_points(points, intrinsics, pose):
    """Vectorised :func:`project`; returns pixels (n, 2) and depths (n,)."""
    p_cam = pose.to_camera(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    z = p_cam[:, 2]
    k = intrinsics
    with np.errstate(divide="ignore", invalid="ignore"):
        u = k.cx + k.fx * p_cam[:, 0] / z
        v = k.cy + k.fy * p_cam[:, 1] / z
    return np.column_stack([u, v]), z


def in_fov(point, intrinsics, pose):
    pixel, depth = project(point, intrinsics, pose)
    return bool(depth > 0 and 0 <= pixel[0] < intrinsics.width and 0 <= pixel[1] < intrinsics.height)


def in_fov_points(points, intrinsics, pose):
    pixels, depths = project_points(points, intrinsics, pose)
    with np.errstate(invalid="ignore"):
        return ((depths > 0)
                & (pixels[:, 0] >= 0) & (pixels[:, 0] < intrinsics.width)
                & (pixels[:, 1] >= 0) & (pixels[:, 1] < intrinsics.height))


def _as_pair_arrays(pairs):
    arr = np.asarray([tuple(p) for p in pairs], dtype=np.float64)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError("depth pairs must be (estimated, reference) tuples")
    return arr[:, 0], arr[:, 1]


def _fit_scale_shift(estimated, reference):
    if estimated.shape[0] < 2:
        raise DegenerateFitError("need at least 2 depth pairs")
    if not (np.all(np.isfinite(estimated)) and np.all(np.isfinite(reference))):
        raise InvalidInputError("depth pairs must be finite")
    if np.any(reference <= 0):
        raise InvalidInputError("reference depths must be positive")
    e_mean = estimated.mean()
    r_mean = reference.mean()
    de = estimated - e_mean
    sxx = np.dot(de, de)
    if np.ptp(estimated) == 0 or sxx == 0:
        raise DegenerateFitError("estimated depths are all equal")
    scale = np.dot(de, reference - r_mean) / sxx
    shift = r_mean - scale * e_mean
    return float(scale), float(shift)


def align_depth(pairs):
    """Least-squares ``(scale, shift)`` mapping estimated depth onto reference.

    Minimises ``sum((scale * estimated + shift - reference) ** 2)`` in closed
    form.
    """
    estimated, reference = _as_pair_arrays(pairs)
    return _fit_scale_shift(estimated, reference)


class DepthAligner(TransformerMixin, BaseEstimator):
    """Scale-shift alignment of relative depth estimates to metric depth.

    ``fit(estimated, reference)`` solves the 2-parameter least-squares problem;
    ``transform(estimated)`` returns ``scale_ * estimated + shift_``.
    """

    def fit(self, X, y):
        estimated = np.asarray(X, dtype=np.float64).reshape(-1)
        reference = np.asarray(y, dtype=np.float64).reshape(-1)
        if estimated.shape != reference.shape:
            raise InvalidInputError("estimated and reference depths differ in length")
        self.scale_, self.shift_ = _fit_scale_shift(estimated, reference)
        self.n_samples_ = estimated.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, ("scale_", "shift_"))
        X = np.asarray(X, dtype=np.float64)
        return self.scale_ * X + self.shift_

    def residual(self, X, y):
        """Sum of squared alignment residuals on ``(X, y)``."""
        r = self.transform(X) - np.asarray(y, dtype=np.float64)
        return float(np.dot(r.reshape(-1), r.reshape(-1)))


class CameraTimeline:
    """Per-frame camera poses stacked for vectorised visibility tests.

    Frames without a camera count as "nothing in view".
    """

    def __init__(self, cameras, n_frames=None):
        cameras = dict(cameras)
        if n_frames is None:
            n_frames = (max(cameras) + 1) if cameras else 0
        self.n_frames = n_frames
        self.has_camera = np.zeros(n_frames, dtype=bool)
        self.rotations = np.tile(np.eye(3), (n_frames, 1, 1))
        self.centers = np.zeros((n_frames, 3))
        self.intrinsics = None
        for t, cam in cameras.items():
            if t >= n_frames:
                continue
            self.has_camera[t] = True
            self.rotations[t] = cam.pose.rotation
            self.centers[t] = cam.pose.translation
            if self.intrinsics is None:
                self.intrinsics = cam.intrinsics
            elif cam.intrinsics != self.intrinsics:
                raise InvalidInputError("camera intrinsics must be fixed within a session")

    @classmethod
    def from_arrays(cls, rotations, centers, intrinsics):
        """Timeline with a camera at every frame from stacked (T, 3, 3) and (T, 3) arrays."""
        rotations = np.asarray(rotations, dtype=np.float64)
        out = cls({}, rotations.shape[0])
        out.has_camera[:] = True
        out.rotations = rotations
        out.centers = np.asarray(centers, dtype=np.float64)
        out.intrinsics = intrinsics
        return out

    def visible(self, points, frames):
        """``in_fov`` of ``points[i]`` for the camera at ``frames[i]``."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        frames = np.asarray(frames, dtype=np.int64).reshape(-1)
        out = np.zeros(frames.shape[0], dtype=bool)
        if self.intrinsics is None or frames.size == 0:
            return out
        ok = (frames >= 0) & (frames < self.n_frames)
        ok[ok] = self.has_camera[frames[ok]]
        f = frames[ok]
        p_cam = np.einsum("nji,nj->ni", self.rotations[f], points[ok] - self.centers[f])
        k = self.intrinsics
        z = p_cam[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = k.cx + k.fx * p_cam[:, 0] / z
            v = k.cy + k.fy * p_cam[:, 1] / z
            out[ok] = (z > 0) & (u >= 0) & (u < k.width) & (v >= 0) & (v < k.height)
        return out

    def distance_to_camera(self, points, frames):
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        frames = np.asarray(frames, dtype=np.int64).reshape(-1)
        return np.linalg.norm(points - self.centers[frames], axis=1)
