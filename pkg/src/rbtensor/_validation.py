"""Input validation helpers, sklearn-style ``check_*`` functions."""

import numpy as np

from .errors import DimensionError


def check_mode(k, order, name="k"):
    """Validate a 1-based mode index against the tensor order."""
    k = int(k)
    if not 1 <= k <= order:
        raise DimensionError(f"{name}={k} outside valid modes 1..{order}")
    return k


def check_circular_params(k, d, order):
    """Validate the (mode, span) pair of a circular unfolding.

    The span d must leave at least one mode for the columns, so d = N is
    rejected even though the row-group formula would still be well defined.
    """
    k = check_mode(k, order)
    d = int(d)
    if not 1 <= d <= order - 1:
        raise DimensionError(f"d={d} outside valid spans 1..{order - 1}")
    return k, d


def check_same_dims(a, b, what="operands"):
    if tuple(a.dims) != tuple(b.dims):
        raise DimensionError(f"{what} have different dims {a.dims} vs {b.dims}")


def check_positive(value, name):
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_channels(c1, c2, ndim=None):
    """Coerce a split-channel pair to matching complex128 arrays."""
    c1 = np.asarray(c1, dtype=np.complex128)
    c2 = np.asarray(c2, dtype=np.complex128)
    if c1.shape != c2.shape:
        raise DimensionError(f"channel shapes differ: {c1.shape} vs {c2.shape}")
    if ndim is not None and c1.ndim != ndim:
        raise DimensionError(f"expected {ndim}-d channels, got {c1.ndim}-d")
    return c1, c2
