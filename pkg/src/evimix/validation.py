"""Input validation helpers shared across the package."""

import numpy as np

SIMPLEX_ATOL = 1e-12


def as_float_array(value, name):
    """Coerce to a float64 ndarray, rejecting non-finite entries."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr!r}")
    return arr


def check_positive(value, name):
    """Validate a scalar or array of strictly positive finite floats."""
    arr = as_float_array(value, name)
    if arr.size and not np.all(arr > 0.0):
        raise ValueError(f"{name} must be strictly positive, got {arr!r}")
    return arr


def check_unit_interval(value, name):
    """Validate values strictly inside (0, 1)."""
    arr = as_float_array(value, name)
    if arr.size and not (np.all(arr > 0.0) and np.all(arr < 1.0)):
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {arr!r}")
    return arr


def check_simplex(value, name, atol=SIMPLEX_ATOL):
    """Validate points on the open probability simplex (rows sum to 1)."""
    arr = as_float_array(value, name)
    if arr.shape[-1] < 2:
        raise ValueError(f"{name} must have at least 2 coordinates")
    if arr.size and not np.all(arr > 0.0):
        raise ValueError(f"{name} must be strictly interior to the simplex")
    sums = arr.sum(axis=-1)
    if arr.size and not np.allclose(sums, 1.0, rtol=0.0, atol=atol):
        raise ValueError(f"{name} rows must sum to 1 within {atol}")
    return arr


def check_probability_vector(value, name, atol=1e-9):
    """Validate a non-negative vector summing to 1 within ``atol``."""
    arr = as_float_array(value, name)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.all(arr >= 0.0):
        raise ValueError(f"{name} must be non-negative")
    if abs(arr.sum() - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1 within {atol}, got sum {arr.sum()!r}")
    return arr


def check_count(value, name, minimum=1):
    """Validate an integer count ``>= minimum``."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
