"""Tensor-ring structure over split-channel cores and its truncated-SVD
construction.

A ring of N third-order cores Z_k of shape (r_k, I_k, r_{k+1}) with
r_{N+1} = r_1 represents the order-N tensor whose (i1, ..., iN) entry is
the trace of the product of lateral slices Z_1(i1) ... Z_N(iN).  Because
the scalar algebra is commutative, the representation is invariant under
cyclic rotation of the cores.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positive
from .errors import DimensionError
from .matrix import RBMatrix, rbsvd
from .scalar import RBScalar
from .tensor import RBTensor, unfold_kmode


class TensorRing:
    """Ordered list of ring cores with a closed rank vector."""

    __slots__ = ("cores",)

    def __init__(self, cores):
        cores = list(cores)
        if len(cores) < 2:
            raise DimensionError("a tensor ring needs at least 2 cores")
        for k, core in enumerate(cores):
            if core.order != 3:
                raise DimensionError(f"core {k} must be third order, got {core.order}")
            nxt = cores[(k + 1) % len(cores)]
            if core.dims[2] != nxt.dims[0]:
                raise DimensionError(
                    f"rank mismatch between cores {k} and {k + 1}: "
                    f"{core.dims[2]} vs {nxt.dims[0]}"
                )
        self.cores = cores

    @property
    def n_cores(self):
        return len(self.cores)

    @property
    def ranks(self):
        return tuple(core.dims[0] for core in self.cores)

    @property
    def dims(self):
        return tuple(core.dims[1] for core in self.cores)

    def slice(self, k, i):
        """Lateral slice Z_k(i) as a matrix (k is 0-based here)."""
        core = self.cores[k]
        return RBMatrix(core.c1[:, i, :], core.c2[:, i, :])

    def element(self, idx) -> RBScalar:
        """Trace of the slice-product chain at a 0-based multi-index."""
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.n_cores:
            raise DimensionError(f"index length {len(idx)} != order {self.n_cores}")
        for i, size in zip(idx, self.dims):
            if not 0 <= i < size:
                raise DimensionError(f"index {idx} out of range for dims {self.dims}")
        prod = self.slice(0, idx[0])
        for k in range(1, self.n_cores):
            prod = prod @ self.slice(k, idx[k])
        return prod.trace()

    def merge_leading(self, k) -> RBTensor:
        """Merge cores 1..k into one (r1, I1*...*Ik, r_{k+1}) core whose
        lateral slices are the partial products of the chain."""
        if not 1 <= k <= self.n_cores - 1:
            raise DimensionError(f"k={k} outside 1..{self.n_cores - 1}")
        return _merge_run(self.cores[:k])

    def merge_trailing(self, k) -> RBTensor:
        """Merge cores k+1..N into one (r_{k+1}, I_{k+1}*...*I_N, r1) core."""
        if not 1 <= k <= self.n_cores - 1:
            raise DimensionError(f"k={k} outside 1..{self.n_cores - 1}")
        return _merge_run(self.cores[k:])

    def reconstruct(self) -> RBTensor:
        """Dense tensor with every entry equal to ``element``."""
        full = _merge_run(self.cores)
        c1 = np.einsum("aia->i", full.c1)
        c2 = np.einsum("aia->i", full.c2)
        return RBTensor(
            c1.reshape(self.dims, order="F"),
            c2.reshape(self.dims, order="F"),
        )

    def rotate(self, steps=1) -> "TensorRing":
        """Cyclically rotate the cores; represents the cyclically
        permuted tensor."""
        steps %= self.n_cores
        return TensorRing(self.cores[steps:] + self.cores[:steps])

    def storage_cost(self) -> int:
        """Total number of core entries, sum of r_k * I_k * r_{k+1}."""
        return int(sum(core.size for core in self.cores))

    def compression_ratio(self, original_dims) -> float:
        return math.prod(original_dims) / self.storage_cost()

    def __repr__(self):
        return f"TensorRing(dims={self.dims}, ranks={self.ranks})"


def _merge_run(cores):
    """Left-to-right slice-product merge of a contiguous core run."""
    c1, c2 = cores[0].c1, cores[0].c2
    for core in cores[1:]:
        c1 = _merge_pair(c1, core.c1)
        c2 = _merge_pair(c2, core.c2)
    return RBTensor(c1, c2)


def _merge_pair(cur, core):
    # cur: (ra, P, rb), core: (rb, I, rc) -> (ra, P*I, rc), earlier index fastest
    ra, p, _ = cur.shape
    _, i, rc = core.shape
    out = np.einsum("apb,bic->aipc", cur, core)
    return out.reshape(ra, p * i, rc)


def tensor_ring_svd(t: RBTensor, eps: float) -> TensorRing:
    """Decompose a tensor into ring cores by sequential truncated SVDs.

    The first unfolding groups mode 1 against the rest and its kept rank
    is split into the two ranks adjacent to core 1; each later sweep
    peels one mode off the remainder.  Truncation keeps singular values
    whose modulus exceeds a threshold proportional to eps * ||t||_F, the
    schedule that bounds the accumulated relative error by roughly eps.

    Parameters
    ----------
    t : RBTensor
        Input tensor of order >= 2.
    eps : float
        Relative tolerance level; must be positive.
    """
    if t.order < 2:
        raise DimensionError("ring decomposition needs order >= 2")
    eps = check_positive(eps, "eps")
    n = t.order
    dims = t.dims
    norm = t.frobenius()
    delta_first = math.sqrt(2.0) * eps * norm / math.sqrt(n)
    delta_rest = eps * norm / math.sqrt(n)

    f = rbsvd(unfold_kmode(t, 1))
    rank = _rank_above(f.singular_moduli, delta_first)
    r1, r2 = _balanced_split(rank)

    u1, u2 = f.u.c1[:, :rank], f.u.c2[:, :rank]
    w1 = f.sigma1[:rank, None] * f.v.c1[:, :rank].conj().T
    w2 = f.sigma2[:rank, None] * f.v.c2[:, :rank].conj().T

    cores = [
        RBTensor(
            u1.reshape(dims[0], r1, r2, order="F").transpose(1, 0, 2),
            u2.reshape(dims[0], r1, r2, order="F").transpose(1, 0, 2),
        )
    ]
    tail = math.prod(dims[1:])
    rem1 = w1.reshape(r1, r2, tail, order="F").transpose(1, 2, 0)
    rem2 = w2.reshape(r1, r2, tail, order="F").transpose(1, 2, 0)

    r_cur = r2
    for k in range(2, n):
        size_k = dims[k - 1]
        cols = rem1.size // (r_cur * size_k)
        m = RBMatrix(
            rem1.reshape(r_cur * size_k, cols, order="F"),
            rem2.reshape(r_cur * size_k, cols, order="F"),
        )
        f = rbsvd(m)
        r_next = _rank_above(f.singular_moduli, delta_rest)
        cores.append(
            RBTensor(
                f.u.c1[:, :r_next].reshape(r_cur, size_k, r_next, order="F"),
                f.u.c2[:, :r_next].reshape(r_cur, size_k, r_next, order="F"),
            )
        )
        w1 = f.sigma1[:r_next, None] * f.v.c1[:, :r_next].conj().T
        w2 = f.sigma2[:r_next, None] * f.v.c2[:, :r_next].conj().T
        tail //= size_k
        rem1 = w1.reshape(r_next, tail, r1, order="F")
        rem2 = w2.reshape(r_next, tail, r1, order="F")
        r_cur = r_next

    cores.append(RBTensor(rem1, rem2))
    return TensorRing(cores)


def _rank_above(moduli, delta):
    """Smallest kept rank whose discarded tail energy stays within
    delta^2; clamped to 1 so a vanishing residue keeps the ring closed.

    The tail-energy rule (rather than a per-value cut at delta) is what
    makes the delta schedule add up to the advertised relative error:
    each sweep then contributes at most delta^2 of squared error.
    """
    tail = np.cumsum(moduli[::-1] ** 2)[::-1]  # tail[r] = energy of values r..end
    budget = delta * delta
    keep = int(np.count_nonzero(tail > budget))
    return max(keep, 1)


def _balanced_split(rank):
    """Factor rank = r1 * r2 with |r1 - r2| minimal and r1 <= r2."""
    best = (1, rank)
    for a in range(1, int(math.isqrt(rank)) + 1):
        if rank % a == 0:
            best = (a, rank // a)
    return best


def storage_cost(ring: TensorRing) -> int:
    return ring.storage_cost()


def compression_ratio(ring: TensorRing, original_dims) -> float:
    return ring.compression_ratio(original_dims)


class TensorRingSVD(BaseEstimator):
    """Estimator wrapper around the ring decomposition.

    Parameters
    ----------
    eps : float, default 1e-2
        Relative truncation tolerance.

    Attributes
    ----------
    cores_ : TensorRing
        Decomposition of the tensor passed to ``fit``.
    ranks_ : tuple of int
    rse_ : float
        Relative reconstruction error achieved on the fitted tensor.
    """

    def __init__(self, eps=1e-2):
        self.eps = eps

    def fit(self, X: RBTensor, y=None):
        self.cores_ = tensor_ring_svd(X, self.eps)
        self.ranks_ = self.cores_.ranks
        self.rse_ = (self.cores_.reconstruct() - X).frobenius() / X.frobenius()
        return self

    def transform(self, X: RBTensor) -> TensorRing:
        return tensor_ring_svd(X, self.eps)

    def inverse_transform(self, ring: TensorRing) -> RBTensor:
        return ring.reconstruct()

    def fit_transform(self, X: RBTensor, y=None) -> TensorRing:
        return self.fit(X).cores_
