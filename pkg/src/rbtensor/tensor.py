"""Dense N-th order tensors over the commutative quaternion algebra.

Mode arguments of all unfold/fold routines are 1-based, matching the
standard multilinear-algebra convention in which the linear index of
(i1, ..., iN) is i1 + (i2 - 1)I1 + ... with the first index fastest.
Storage keeps the two complex split channels as numpy arrays of the
tensor's natural shape; every reshape below uses Fortran order so the
linearization above holds exactly.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import check_channels, check_circular_params, check_mode
from .errors import DimensionError
from .matrix import RBMatrix
from .scalar import RBScalar


class RBTensor:
    """Dense tensor in split-channel storage. Immutable by convention."""

    __slots__ = ("c1", "c2")

    def __init__(self, c1, c2):
        c1, c2 = check_channels(c1, c2)
        if c1.ndim < 1:
            raise DimensionError("tensors must have order >= 1")
        self.c1 = c1
        self.c2 = c2

    @classmethod
    def from_components(cls, a, b=None, c=None, d=None):
        a = np.asarray(a, dtype=float)
        b = np.zeros_like(a) if b is None else np.asarray(b, dtype=float)
        c = np.zeros_like(a) if c is None else np.asarray(c, dtype=float)
        d = np.zeros_like(a) if d is None else np.asarray(d, dtype=float)
        qa = a + 1j * b
        qb = c + 1j * d
        return cls(qa + qb, qa - qb)

    @classmethod
    def from_real(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr.astype(complex), arr.astype(complex))

    @classmethod
    def zeros(cls, dims):
        z = np.zeros(tuple(dims), dtype=complex)
        return cls(z, z.copy())

    @classmethod
    def random(cls, dims, rng):
        """Entries with iid uniform(-1, 1) coefficients a, b, c, d."""
        a, b, c, d = rng.uniform(-1.0, 1.0, size=(4, *dims))
        return cls.from_components(a, b, c, d)

    @property
    def dims(self):
        return self.c1.shape

    @property
    def order(self):
        return self.c1.ndim

    @property
    def size(self):
        return self.c1.size

    @property
    def components(self):
        qa = 0.5 * (self.c1 + self.c2)
        qb = 0.5 * (self.c1 - self.c2)
        return (qa.real, qa.imag, qb.real, qb.imag)

    def __getitem__(self, idx):
        v1 = self.c1[idx]
        v2 = self.c2[idx]
        if np.ndim(v1) != 0:
            return RBTensor(v1, v2)
        return RBScalar(complex(v1), complex(v2))

    def __add__(self, other):
        return RBTensor(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return RBTensor(self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self):
        return RBTensor(-self.c1, -self.c2)

    def __mul__(self, other):
        if isinstance(other, RBScalar):
            return RBTensor(self.c1 * other.c1, self.c2 * other.c2)
        return RBTensor(self.c1 * other, self.c2 * other)

    __rmul__ = __mul__

    def frobenius(self):
        s = np.sum(np.abs(self.c1) ** 2) + np.sum(np.abs(self.c2) ** 2)
        return float(np.sqrt(0.5 * s))

    def transpose(self, axes):
        return RBTensor(self.c1.transpose(axes), self.c2.transpose(axes))

    def copy(self):
        return RBTensor(self.c1.copy(), self.c2.copy())

    def allclose(self, other, tol=1e-12):
        return np.allclose(self.c1, other.c1, rtol=0, atol=tol) and np.allclose(
            self.c2, other.c2, rtol=0, atol=tol
        )

    def __repr__(self):
        return f"RBTensor(dims={self.dims})"


class IndexMask:
    """Boolean observation pattern over a tensor's entries."""

    __slots__ = ("observed",)

    def __init__(self, observed):
        self.observed = np.asarray(observed, dtype=bool)

    @classmethod
    def full(cls, dims):
        return cls(np.ones(tuple(dims), dtype=bool))

    @classmethod
    def empty(cls, dims):
        return cls(np.zeros(tuple(dims), dtype=bool))

    @property
    def dims(self):
        return self.observed.shape

    @property
    def count(self):
        return int(np.count_nonzero(self.observed))

    @property
    def sampling_rate(self):
        return self.count / self.observed.size

    def complement(self):
        return IndexMask(~self.observed)


def project_mask(t: RBTensor, mask: IndexMask, keep_observed=True) -> RBTensor:
    """Zero out entries outside the selected index set."""
    if tuple(mask.dims) != tuple(t.dims):
        raise DimensionError(f"mask dims {mask.dims} do not match tensor {t.dims}")
    keep = mask.observed if keep_observed else ~mask.observed
    return RBTensor(np.where(keep, t.c1, 0.0), np.where(keep, t.c2, 0.0))


# ---------------------------------------------------------------------------
# Unfoldings.  Each variant fixes a permutation of the modes and flattens
# the permuted tensor in Fortran order, so the first listed mode always
# runs fastest within its row/column group.

def _axes_classical(k, order):
    return [k - 1] + [ax for ax in range(order) if ax != k - 1]

def _axes_mode(k, order):
    return [(k - 1 + t) % order for t in range(order)]

def _axes_circular(k, d, order):
    m = k - d + 1
    if d > k:
        m += order
    rows = [(m - 1 + t) % order for t in range(d)]
    cols = [(k + t) % order for t in range(order - d)]
    return rows + cols


def _unfold(t, axes, n_row_axes):
    perm = t.transpose(axes)
    rows = math.prod(perm.dims[:n_row_axes])
    c1 = perm.c1.reshape((rows, -1), order="F")
    c2 = perm.c2.reshape((rows, -1), order="F")
    return RBMatrix(c1, c2)


def _fold(mat, axes, dims, n_row_axes):
    dims = tuple(int(v) for v in dims)
    perm_dims = tuple(dims[ax] for ax in axes)
    rows = math.prod(perm_dims[:n_row_axes])
    cols = math.prod(perm_dims[n_row_axes:])
    if mat.shape != (rows, cols):
        raise DimensionError(
            f"matrix shape {mat.shape} inconsistent with dims {dims}: "
            f"expected {(rows, cols)}"
        )
    inverse = np.argsort(axes)
    c1 = mat.c1.reshape(perm_dims, order="F").transpose(inverse)
    c2 = mat.c2.reshape(perm_dims, order="F").transpose(inverse)
    return RBTensor(c1, c2)


def unfold_classical(t: RBTensor, k: int) -> RBMatrix:
    """Classical mode-k unfolding: I_k rows, remaining modes in natural
    order along the columns (the customary matricization)."""
    k = check_mode(k, t.order)
    return _unfold(t, _axes_classical(k, t.order), 1)


def fold_classical(mat: RBMatrix, k: int, dims) -> RBTensor:
    k = check_mode(k, len(dims))
    return _fold(mat, _axes_classical(k, len(dims)), dims, 1)


def unfold_mode(t: RBTensor, k: int) -> RBMatrix:
    """Mode-k unfolding with cyclic column order starting at mode k+1."""
    k = check_mode(k, t.order)
    return _unfold(t, _axes_mode(k, t.order), 1)


def fold_mode(mat: RBMatrix, k: int, dims) -> RBTensor:
    k = check_mode(k, len(dims))
    return _fold(mat, _axes_mode(k, len(dims)), dims, 1)


def unfold_kmode(t: RBTensor, k: int) -> RBMatrix:
    """k-mode unfolding: the first k modes index rows, the rest columns."""
    k = check_mode(k, t.order)
    return _unfold(t, list(range(t.order)), k)


def fold_kmode(mat: RBMatrix, k: int, dims) -> RBTensor:
    k = check_mode(k, len(dims))
    return _fold(mat, list(range(len(dims))), dims, k)


def unfold_circular(t: RBTensor, k: int, d: int) -> RBMatrix:
    """Circular unfolding: rows indexed by the d cyclically contiguous
    modes ending at k, columns by the remaining modes (cyclic order)."""
    k, d = check_circular_params(k, d, t.order)
    return _unfold(t, _axes_circular(k, d, t.order), d)


def fold_circular(mat: RBMatrix, k: int, d: int, dims) -> RBTensor:
    k, d = check_circular_params(k, d, len(dims))
    return _fold(mat, _axes_circular(k, d, len(dims)), dims, d)


def tensor_frobenius(t: RBTensor) -> float:
    """Frobenius norm; identical for the tensor and any of its unfoldings."""
    return t.frobenius()


__all__ = [
    "RBTensor",
    "IndexMask",
    "project_mask",
    "unfold_classical",
    "fold_classical",
    "unfold_mode",
    "fold_mode",
    "unfold_kmode",
    "fold_kmode",
    "unfold_circular",
    "fold_circular",
    "tensor_frobenius",
]
