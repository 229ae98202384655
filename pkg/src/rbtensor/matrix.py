"""Dense matrices over the commutative quaternion algebra.

A matrix Q = Qc1*e1 + Qc2*e2 is stored as the complex channel pair
(Qc1, Qc2).  Products, conjugate transposes and SVDs all decouple over
the two channels, which is what makes this algebra cheap: the SVD of Q
is assembled from two ordinary complex SVDs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_channels
from .errors import DimensionError, NumericalError
from .scalar import RBScalar


class RBMatrix:
    """Dense matrix in split-channel storage."""

    __slots__ = ("c1", "c2")

    def __init__(self, c1, c2):
        self.c1, self.c2 = check_channels(c1, c2, ndim=2)

    @classmethod
    def from_components(cls, a, b=None, c=None, d=None):
        """Build from real coefficient matrices of A + B*i + C*j + D*k."""
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
    def zeros(cls, rows, cols):
        z = np.zeros((rows, cols), dtype=complex)
        return cls(z, z.copy())

    @classmethod
    def eye(cls, n):
        e = np.eye(n, dtype=complex)
        return cls(e, e.copy())

    @classmethod
    def random(cls, rows, cols, rng):
        """Entries with iid uniform(-1, 1) coefficients a, b, c, d."""
        a, b, c, d = rng.uniform(-1.0, 1.0, size=(4, rows, cols))
        return cls.from_components(a, b, c, d)

    @property
    def shape(self):
        return self.c1.shape

    @property
    def dims(self):
        return self.c1.shape

    @property
    def components(self):
        """Real coefficient matrices (A, B, C, D)."""
        qa = 0.5 * (self.c1 + self.c2)
        qb = 0.5 * (self.c1 - self.c2)
        return (qa.real, qa.imag, qb.real, qb.imag)

    def __getitem__(self, idx):
        i, j = idx
        return RBScalar(self.c1[i, j], self.c2[i, j])

    def __add__(self, other):
        return RBMatrix(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return RBMatrix(self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self):
        return RBMatrix(-self.c1, -self.c2)

    def __mul__(self, other):
        if isinstance(other, RBScalar):
            return RBMatrix(self.c1 * other.c1, self.c2 * other.c2)
        return RBMatrix(self.c1 * other, self.c2 * other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise DimensionError(
                f"matmul shape mismatch: {self.shape} @ {other.shape}"
            )
        return RBMatrix(self.c1 @ other.c1, self.c2 @ other.c2)

    def conj_transpose(self):
        return RBMatrix(self.c1.conj().T, self.c2.conj().T)

    @property
    def H(self):
        return self.conj_transpose()

    def trace(self):
        return RBScalar(np.trace(self.c1), np.trace(self.c2))

    def frobenius(self):
        """sqrt of the sum of squared entry moduli."""
        s = np.sum(np.abs(self.c1) ** 2) + np.sum(np.abs(self.c2) ** 2)
        return float(np.sqrt(0.5 * s))

    def real_rep(self):
        """4M x 4N real representation with the blockwise layout

        [[A, -B,  C, -D],
         [B,  A,  D,  C],
         [C, -D,  A, -B],
         [D,  C,  B,  A]].
        """
        a, b, c, d = self.components
        return np.block(
            [
                [a, -b, c, -d],
                [b, a, d, c],
                [c, -d, a, -b],
                [d, c, b, a],
            ]
        )

    def copy(self):
        return RBMatrix(self.c1.copy(), self.c2.copy())

    def allclose(self, other, tol=1e-12):
        return np.allclose(self.c1, other.c1, rtol=0, atol=tol) and np.allclose(
            self.c2, other.c2, rtol=0, atol=tol
        )

    def __repr__(self):
        return f"RBMatrix(shape={self.shape})"


def complex_svd(a, channel):
    """Economy SVD of a dense complex matrix, returning (U, s, V).

    Falls back to the slower gesvd driver when the default divide-and-
    conquer routine does not converge; `channel` only labels the error.
    """
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError:
        try:
            u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
        except scipy.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD failed to converge on channel {channel}") from exc
    return u, s, vh.conj().T


@dataclass
class RBSvdResult:
    """Factors of Q = U diag(sigma1*e1 + sigma2*e2) V^H.

    The channel singular values are each sorted descending and paired by
    index; sigma1[i]*e1 + sigma2[i]*e2 is the i-th singular value of Q.
    """

    u: RBMatrix
    sigma1: np.ndarray
    sigma2: np.ndarray
    v: RBMatrix

    @property
    def singular_moduli(self):
        return np.sqrt(0.5 * (self.sigma1**2 + self.sigma2**2))

    def reconstruct(self):
        return RBMatrix(
            (self.u.c1 * self.sigma1) @ self.v.c1.conj().T,
            (self.u.c2 * self.sigma2) @ self.v.c2.conj().T,
        )


def rbsvd(a: RBMatrix) -> RBSvdResult:
    """SVD of a split-channel matrix via two independent complex SVDs."""
    u1, s1, v1 = complex_svd(a.c1, channel=1)
    u2, s2, v2 = complex_svd(a.c2, channel=2)
    return RBSvdResult(RBMatrix(u1, u2), s1, s2, RBMatrix(v1, v2))


def rb_rank(a: RBMatrix, tol=1e-10) -> int:
    """Number of singular values whose modulus exceeds tol * largest."""
    moduli = rbsvd(a).singular_moduli
    if moduli.size == 0 or moduli[0] == 0.0:
        return 0
    return int(np.count_nonzero(moduli > tol * moduli[0]))


def nuclear_norm(a: RBMatrix) -> float:
    """Sum of singular-value moduli."""
    return float(np.sum(rbsvd(a).singular_moduli))


def svt(gamma: RBMatrix, tau: float) -> RBMatrix:
    """Singular-value soft thresholding, applied to each channel.

    Every channel singular value is shrunk by tau and clipped at zero;
    this is the proximal step of the channel-mean nuclear norm
    (||Qc1||_* + ||Qc2||_*) / 2 under the split Frobenius geometry.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    f = rbsvd(gamma)
    s1 = np.maximum(f.sigma1 - tau, 0.0)
    s2 = np.maximum(f.sigma2 - tau, 0.0)
    return RBMatrix(
        (f.u.c1 * s1) @ f.v.c1.conj().T,
        (f.u.c2 * s2) @ f.v.c2.conj().T,
    )


def vector_norm(y: RBMatrix) -> float:
    """2-norm of a vector (any shape is flattened): sqrt(sum |y_i|^2)."""
    return y.frobenius()


def group_shrink(y: RBMatrix, lam: float, beta: float) -> RBMatrix:
    """Closed-form minimizer of (beta/2)*||x - y||_2^2 + lam*||x||_2.

    Shrinks the whole vector toward zero: max(||y|| - lam/beta, 0) * y/||y||.
    The zero vector maps to zero.
    """
    if beta <= 0 or lam <= 0:
        raise ValueError("group_shrink needs lam > 0 and beta > 0")
    norm = vector_norm(y)
    if norm == 0.0:
        return y.copy()
    factor = max(norm - lam / beta, 0.0) / norm
    return y * factor


def real_inner(x: RBMatrix, y: RBMatrix) -> float:
    """Re <x, y> = sum of componentwise real dot products."""
    s = np.vdot(x.c1, y.c1) + np.vdot(x.c2, y.c2)
    return float(0.5 * s.real)
