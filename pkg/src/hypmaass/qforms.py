"""Integral binary quadratic forms of positive discriminant.

Evaluation at points of the upper half-plane, the geodesic invariant,
the SL2(Z) action, Moebius transformations, and complete enumeration of
all forms of a fixed discriminant whose value at a point is bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QForm",
    "UpperHalfPoint",
    "GroupElement",
    "NotADiscriminantError",
    "SquareDiscriminantError",
    "validate_discriminant",
    "discriminant",
    "evaluate",
    "geodesic_invariant",
    "z_derivative",
    "act",
    "mobius",
    "cocycle",
    "enumerate_bounded",
    "IDENTITY",
    "S",
    "T",
]


class NotADiscriminantError(ValueError):
    """Raised for D not congruent to 0 or 1 mod 4, or D <= 0."""


class SquareDiscriminantError(ValueError):
    """Raised for perfect-square D (the a=0 family is out of range)."""


@dataclass(frozen=True)
class QForm:
    """The form Q(X, Y) = a X^2 + b X Y + c Y^2 with integer coefficients."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"QForm({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point x + iy of the upper half-plane (y > 0).

    Doubles as the theta variable tau = u + iv; u and v are aliases.
    """

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"imaginary part must be positive, got {self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def u(self) -> float:
        return self.x

    @property
    def v(self) -> float:
        return self.y

    @property
    def q(self) -> complex:
        """The nome e^{2 pi i z}."""
        import cmath

        return cmath.exp(2j * math.pi * self.z)

    @classmethod
    def from_complex(cls, z: complex) -> "UpperHalfPoint":
        return cls(float(z.real), float(z.imag))

    def __complex__(self) -> complex:
        return self.z


@dataclass(frozen=True)
class GroupElement:
    """An integer 2x2 matrix of determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det != 1:
            raise ValueError(f"determinant must be 1, got {det}")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "GroupElement":
        # -I is not unimodular-violating: det(-g) = det(g) in 2x2
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def inv(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)


def validate_discriminant(D: int) -> None:
    """Reject D unless it is a positive non-square discriminant."""
    if D <= 0 or D % 4 not in (0, 1):
        raise NotADiscriminantError(f"{D} is not a positive discriminant (need D > 0, D = 0,1 mod 4)")
    r = math.isqrt(D)
    if r * r == D:
        raise SquareDiscriminantError(f"square discriminant {D} is outside the supported range")


def discriminant(Q: QForm) -> int:
    return Q.b * Q.b - 4 * Q.a * Q.c


def evaluate(Q: QForm, pt: UpperHalfPoint) -> complex:
    """Q(z, 1) = a z^2 + b z + c."""
    z = pt.z
    return (Q.a * z + Q.b) * z + Q.c


def geodesic_invariant(Q: QForm, pt: UpperHalfPoint) -> float:
    """The real quantity (a |z|^2 + b x + c) / y, zero exactly on the geodesic of Q."""
    x, y = pt.x, pt.y
    return (Q.a * (x * x + y * y) + Q.b * x + Q.c) / y


def z_derivative(Q: QForm, pt: UpperHalfPoint) -> complex:
    """d/dz of Q(z, 1), i.e. 2 a z + b."""
    return 2 * Q.a * pt.z + Q.b


def act(Q: QForm, g: GroupElement) -> QForm:
    """Right action: (Q . g)(x, y) = Q(a x + b y, c x + d y)."""
    a, b, c, d = g.a, g.b, g.c, g.d
    return QForm(
        Q.a * a * a + Q.b * a * c + Q.c * c * c,
        2 * Q.a * a * b + Q.b * (a * d + b * c) + 2 * Q.c * c * d,
        Q.a * b * b + Q.b * b * d + Q.c * d * d,
    )


def mobius(g: GroupElement, pt: UpperHalfPoint) -> UpperHalfPoint:
    """(a z + b) / (c z + d); the image stays in the upper half-plane."""
    z = pt.z
    w = (g.a * z + g.b) / (g.c * z + g.d)
    return UpperHalfPoint(w.real, w.imag)


def cocycle(g: GroupElement, pt: UpperHalfPoint) -> complex:
    """j(g, z) = c z + d."""
    return g.c * pt.z + g.d


def _enumerate_arrays(D: int, x: float, y: float, R: float):
    """All (a, b, c) with b^2 - 4ac = D and |a z^2 + b z + c| <= R, canonically sorted.

    Returns three int64 arrays. Completeness: |2 a y^2| <= 2R forces
    |a| <= R / y^2, |Im Q(z,1)| = |(2 a x + b) y| <= R windows b, and c is
    the unique integer (b^2 - D) / (4a) when divisible.  a = 0 cannot occur
    for non-square D.
    """
    validate_discriminant(D)
    return _box_arrays(D, x, y, R)


def _box_arrays(D: int, x: float, y: float, R: float):
    """The a != 0 part of the bounded enumeration, for any D = 0, 1 mod 4."""
    if R < 0 or R * R < D * y * y:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), e.copy()
    if R > 1e7:
        raise ValueError(f"enumeration radius {R} exceeds the resource budget")
    x2y2 = x * x + y * y
    Ry = R / y
    amax = int(math.floor(R / (y * y)))
    parity = D & 1
    out_a, out_b, out_c = [], [], []
    for a in range(-amax, amax + 1):
        if a == 0:
            continue
        lo = math.ceil(-Ry - 2 * a * x)
        hi = math.floor(Ry - 2 * a * x)
        if lo % 2 != parity:
            lo += 1
        if hi < lo:
            continue
        b = np.arange(lo, hi + 1, 2, dtype=np.int64)
        t = (b * b - D) >> 2
        mask = t % a == 0
        if not mask.any():
            continue
        b = b[mask]
        c = t[mask] // a
        qzy = a * x2y2 + b * x + c
        keep = D * y * y + qzy * qzy <= R * R
        if keep.any():
            out_a.append(np.full(int(keep.sum()), a, dtype=np.int64))
            out_b.append(b[keep])
            out_c.append(c[keep])
    if not out_a:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), e.copy()
    aa = np.concatenate(out_a)
    bb = np.concatenate(out_b)
    cc = np.concatenate(out_c)
    order = np.lexsort((bb, np.abs(bb), aa, np.abs(aa)))
    return aa[order], bb[order], cc[order]


def enumerate_bounded(D: int, pt: UpperHalfPoint, R: float) -> list[QForm]:
    """The complete list of forms of discriminant D with |Q(z,1)| <= R.

    Boundary inclusive; sorted by (|a|, a, |b|, b).  A square or
    non-discriminant D raises; R^2 < D y^2 returns the empty list.
    """
    aa, bb, cc = _enumerate_arrays(D, pt.x, pt.y, R)
    return [QForm(int(a), int(b), int(c)) for a, b, c in zip(aa, bb, cc)]
