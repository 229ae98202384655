"""Shared builders for randomized test data."""

# RSE of the first passing synthetic completion run (seed 7, SR 0.5,
# default solver parameters); regression tests hold runs to +/-10%.
REGRESSION_RSE = 0.035329875958091984

import numpy as np
import pytest

from rbtensor import RBScalar, RBTensor
from rbtensor.ring import TensorRing


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scalar(rng, scale=1.0):
    a, b, c, d = rng.uniform(-scale, scale, size=4)
    return RBScalar.from_components(a, b, c, d)


def random_ring(rng, dims, ranks):
    """Ring with the given mode sizes and (cyclic) rank vector."""
    n = len(dims)
    cores = [
        RBTensor.random((ranks[k], dims[k], ranks[(k + 1) % n]), rng)
        for k in range(n)
    ]
    return TensorRing(cores)


def smooth_ring_tensor(seed=7, slope=0.3, rank_pairs=((1, 2), (2, 2), (2, 1), (1, 1)), size=4):
    """Low-ring-rank tensor whose core slices vary linearly along each
    mode, an image-like (locally smooth) completion target."""
    gen = np.random.default_rng(seed)
    cores = []
    for r1, r2 in rank_pairs:
        base = gen.uniform(-1, 1, size=(4, r1, 1, r2))
        step = gen.uniform(-1, 1, size=(4, r1, 1, r2)) * slope
        grid = np.linspace(0.0, 1.0, size)[None, None, :, None]
        cores.append(RBTensor.from_components(*(base + step * grid)))
    return TensorRing(cores).reconstruct()


# 1-based entry positions per the displayed index maps; these are the
# brute-force oracles the unfolding implementations are checked against.

def classical_position(idx, dims, k):
    row = idx[k - 1]
    col, weight = 1, 1
    for mode in [m for m in range(1, len(dims) + 1) if m != k]:
        col += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    return row, col


def mode_position(idx, dims, k):
    n = len(dims)
    col, weight = 1, 1
    for step in range(1, n):
        mode = ((k - 1 + step) % n) + 1
        col += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    return idx[k - 1], col


def kmode_position(idx, dims, k):
    row, weight = 1, 1
    for mode in range(1, k + 1):
        row += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    col, weight = 1, 1
    for mode in range(k + 1, len(dims) + 1):
        col += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    return row, col


def circular_position(idx, dims, k, d):
    n = len(dims)
    m = k - d + 1 if d <= k else k - d + 1 + n
    row_modes = [((m - 1 + t) % n) + 1 for t in range(d)]
    col_modes = [((k + t) % n) + 1 for t in range(n - d)]
    row, weight = 1, 1
    for mode in row_modes:
        row += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    col, weight = 1, 1
    for mode in col_modes:
        col += (idx[mode - 1] - 1) * weight
        weight *= dims[mode - 1]
    return row, col
