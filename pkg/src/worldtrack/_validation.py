"""Input validation helpers shared by the estimators."""

import numbers

import numpy as np

from .exceptions import InvalidInputError


def check_points(points, name="points", dim=3):
    """Return ``points`` as a finite float array of shape (n, dim)."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, dim)
    if arr.ndim == 1 and arr.shape[0] == dim:
        arr = arr.reshape(1, dim)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InvalidInputError(f"{name} must have shape (n, {dim}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_point(point, name="point"):
    arr = np.asarray(point, dtype=np.float64)
    if arr.shape != (3,):
        raise InvalidInputError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_appearances(appearances, n_rows, dim=None, name="appearances"):
    arr = np.asarray(appearances, dtype=np.float64)
    if arr.size == 0 and n_rows == 0:
        return arr.reshape(0, dim if dim is not None else (arr.shape[-1] if arr.ndim == 2 else 0))
    if arr.ndim != 2 or arr.shape[0] != n_rows:
        raise InvalidInputError(
            f"{name} must have shape ({n_rows}, dim), got {arr.shape}"
        )
    if dim is not None and arr.shape[1] != dim:
        raise InvalidInputError(
            f"appearance dimension mismatch: expected {dim}, got {arr.shape[1]}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_scalar(value, name, *, min_val=None, max_val=None, include_min=True,
                 integer=False):
    """Validate a scalar hyperparameter and return it as float or int."""
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kind):
        raise InvalidInputError(f"{name} must be {'an integer' if integer else 'a real number'}, got {value!r}")
    if not np.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    if min_val is not None:
        if include_min and value < min_val:
            raise InvalidInputError(f"{name} must be >= {min_val}, got {value!r}")
        if not include_min and value <= min_val:
            raise InvalidInputError(f"{name} must be > {min_val}, got {value!r}")
    if max_val is not None and value > max_val:
        raise InvalidInputError(f"{name} must be <= {max_val}, got {value!r}")
    return int(value) if integer else float(value)


def check_probability(value, name):
    return check_scalar(value, name, min_val=0.0, max_val=1.0)


def check_choice(value, name, choices):
    if value not in choices:
        raise InvalidInputError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value
