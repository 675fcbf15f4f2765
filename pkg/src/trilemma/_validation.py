"""Input checks shared by the functional API and the estimators."""
import math
from numbers import Real

import numpy as np

from .exceptions import AllZero, NegativeValue, WindowTooLarge

CHAINS = ("algorand", "ethereum2")
LAYERS = ("consensus", "transaction")
INDEX_NAMES = ("shannon", "gini", "nakamoto", "hhi")


def check_share_vector(values):
    """Return `values` as a 1-D float64 array fit for normalization.

    Raises NegativeValue for any negative entry and AllZero when nothing
    is positive. NaN and infinity are rejected with ValueError.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise AllZero("empty vector has no positive value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains NaN or infinite values")
    if np.any(arr < 0):
        raise NegativeValue(f"negative value {arr[arr < 0][0]!r} in share vector")
    if not np.any(arr > 0):
        raise AllZero("all values are zero")
    return arr


def check_threshold(threshold):
    if isinstance(threshold, bool) or not isinstance(threshold, Real):
        raise TypeError(f"threshold must be a real number, got {threshold!r}")
    threshold = float(threshold)
    if not (0.0 < threshold < 1.0) or math.isnan(threshold):
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    return threshold


def check_window(window, length=None):
    if isinstance(window, bool) or not isinstance(window, (int, np.integer)):
        raise TypeError(f"window must be an integer, got {window!r}")
    if window < 2:
        raise ValueError(f"window must be at least 2, got {window}")
    if length is not None and length < window:
        raise WindowTooLarge(f"window {window} exceeds series length {length}")
    return int(window)


def check_choice(value, choices, what):
    if value not in choices:
        raise ValueError(f"unknown {what} {value!r}; expected one of {', '.join(choices)}")
    return value
