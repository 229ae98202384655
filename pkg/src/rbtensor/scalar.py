"""Scalar arithmetic over the commutative quaternion algebra.

Numbers q = a + b*i + c*j + d*k with i^2 = k^2 = -1, j^2 = 1 and
ij = ji = k form a commutative algebra.  The orthogonal idempotents
e1 = (1+j)/2 and e2 = (1-j)/2 split every such number into two
independent complex channels

    q = c1*e1 + c2*e2,    c1 = (a+bi) + (c+di),  c2 = (a+bi) - (c+di),

and all products, conjugates and norms decouple channel-wise.  The split
pair (c1, c2) is the canonical storage everywhere in this library; the
(a, b, c, d) coefficient view is derived.
"""

from __future__ import annotations

import numpy as np


class RBScalar:
    """One reduced-biquaternion number in split-channel storage."""

    __slots__ = ("c1", "c2")

    def __init__(self, c1, c2):
        self.c1 = complex(c1)
        self.c2 = complex(c2)

    @classmethod
    def from_components(cls, a, b=0.0, c=0.0, d=0.0):
        """Build from real coefficients of a + b*i + c*j + d*k."""
        qa = complex(a, b)
        qb = complex(c, d)
        return cls(qa + qb, qa - qb)

    @property
    def components(self):
        """Real coefficients (a, b, c, d)."""
        qa = 0.5 * (self.c1 + self.c2)
        qb = 0.5 * (self.c1 - self.c2)
        return (qa.real, qa.imag, qb.real, qb.imag)

    def conj(self):
        """Conjugate a - b*i + c*j - d*k; channel-wise complex conjugation."""
        return RBScalar(self.c1.conjugate(), self.c2.conjugate())

    def modulus(self):
        """sqrt(a^2 + b^2 + c^2 + d^2) = sqrt((|c1|^2 + |c2|^2) / 2)."""
        return np.sqrt(0.5 * (abs(self.c1) ** 2 + abs(self.c2) ** 2))

    def real_rep(self):
        """The 4x4 real representation; rank 4 unless a channel vanishes."""
        a, b, c, d = self.components
        return np.array(
            [
                [a, -b, c, -d],
                [b, a, d, c],
                [c, -d, a, -b],
                [d, c, b, a],
            ]
        )

    def __add__(self, other):
        other = _coerce(other)
        return RBScalar(self.c1 + other.c1, self.c2 + other.c2)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return RBScalar(self.c1 - other.c1, self.c2 - other.c2)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return RBScalar(-self.c1, -self.c2)

    def __mul__(self, other):
        # e1, e2 are orthogonal idempotents, so products act channel-wise.
        other = _coerce(other)
        return RBScalar(self.c1 * other.c1, self.c2 * other.c2)

    __rmul__ = __mul__

    def __abs__(self):
        return self.modulus()

    def __eq__(self, other):
        if not isinstance(other, (RBScalar, int, float, complex)):
            return NotImplemented
        other = _coerce(other)
        return self.c1 == other.c1 and self.c2 == other.c2

    def __hash__(self):
        return hash((self.c1, self.c2))

    def isclose(self, other, tol=1e-12):
        other = _coerce(other)
        return abs(self.c1 - other.c1) <= tol and abs(self.c2 - other.c2) <= tol

    def __repr__(self):
        a, b, c, d = self.components
        return f"RBScalar({a:+g}{b:+g}i{c:+g}j{d:+g}k)"


def _coerce(value):
    if isinstance(value, RBScalar):
        return value
    if isinstance(value, complex):
        # complex x + yi embeds with both channels equal
        return RBScalar(value, value)
    return RBScalar(value, value)


ONE = RBScalar.from_components(1.0)
UNIT_I = RBScalar.from_components(0.0, 1.0)
UNIT_J = RBScalar.from_components(0.0, 0.0, 1.0)
UNIT_K = RBScalar.from_components(0.0, 0.0, 0.0, 1.0)
E1 = RBScalar(1.0, 0.0)
E2 = RBScalar(0.0, 1.0)
