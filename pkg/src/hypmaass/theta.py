"""Indefinite theta machinery for the quadratic form b^2 - 4ac on Z^3.

The kernel p of the theta series, its Euler/Laplace differential
operator checked exactly by second-order forward-mode jets, the
two-variable generating kernels over discriminants, plus-space support
extraction, and half-integral-weight modularity residuals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .maass_ops import slash
from .qforms import GroupElement, UpperHalfPoint, _box_arrays
from .series import SeriesParams, _fsum_complex, _initial_radius, f_hyperbolic, omega

__all__ = [
    "VignerasSetup",
    "Jet2",
    "vigneras_p",
    "vigneras_residual",
    "discriminants_up_to",
    "omega_kernel",
    "lambda_kernel",
    "plus_space_violations",
    "half_integral_modularity_residual",
    "InsufficientDepthError",
]

SQUARE_D_NOTE = (
    "kernel D-sums cover the complete lattice, square-discriminant layers "
    "included; standalone series evaluators accept non-square D only"
)


class InsufficientDepthError(ArithmeticError):
    """The discriminant cutoff leaves a last term above tolerance."""


def _frac_matmul(A, B):
    n = len(A)
    return [
        [sum(A[i][t] * B[t][j] for t in range(n)) for j in range(n)]
        for i in range(n)
    ]


@dataclass(frozen=True)
class VignerasSetup:
    """Lattice Z^3 with q(a,b,c) = b^2 - 4ac; eigenvalue k-1, level 4."""

    k: int
    dimension: int = 3
    level: int = 4
    gram: tuple = (
        (Fraction(0), Fraction(0), Fraction(-4)),
        (Fraction(0), Fraction(2), Fraction(0)),
        (Fraction(-4), Fraction(0), Fraction(0)),
    )
    gram_inverse: tuple = (
        (Fraction(0), Fraction(0), Fraction(-1, 4)),
        (Fraction(0), Fraction(1, 2), Fraction(0)),
        (Fraction(-1, 4), Fraction(0), Fraction(0)),
    )

    @property
    def eigenvalue(self) -> int:
        return self.k - 1

    def check_inverse(self) -> bool:
        prod = _frac_matmul([list(r) for r in self.gram], [list(r) for r in self.gram_inverse])
        return all(prod[i][j] == (1 if i == j else 0) for i in range(3) for j in range(3))

    @staticmethod
    def quadratic(w) -> float:
        a, b, c = w
        return b * b - 4 * a * c

    def quadratic_via_gram(self, w):
        """(1/2) w^T A w; agrees with b^2 - 4ac on all triples."""
        A = self.gram
        acc = 0
        for i in range(3):
            for j in range(3):
                acc += w[i] * A[i][j] * w[j]
        return acc / 2

    @staticmethod
    def bilinear(u, v):
        """Polarization <u, v> with <w, w> = q(w)."""
        a1, b1, c1 = u
        a2, b2, c2 = v
        return b1 * b2 - 2 * (a1 * c2 + c1 * a2)

    @staticmethod
    def isotropic_vector(pt: UpperHalfPoint):
        z = pt.z
        return (0.5, z, z * z / 2)


class Jet2:
    """Second-order forward-mode jet in three real variables.

    Carries value, gradient and symmetric Hessian; arithmetic propagates
    them exactly to machine rounding.
    """

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad=None, hess=None):
        self.val = complex(val)
        self.grad = np.zeros(3, dtype=complex) if grad is None else np.asarray(grad, dtype=complex)
        self.hess = np.zeros((3, 3), dtype=complex) if hess is None else np.asarray(hess, dtype=complex)

    @classmethod
    def variable(cls, value: float, index: int) -> "Jet2":
        g = np.zeros(3, dtype=complex)
        g[index] = 1.0
        return cls(value, g)

    def _lift(self, other):
        if isinstance(other, Jet2):
            return other
        return Jet2(other)

    def __add__(self, other):
        o = self._lift(other)
        return Jet2(self.val + o.val, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.val, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        outer = np.outer(self.grad, o.grad)
        return Jet2(
            self.val * o.val,
            self.val * o.grad + o.val * self.grad,
            self.val * o.hess + o.val * self.hess + outer + outer.T,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._lift(other)._reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self._reciprocal()

    def _reciprocal(self):
        inv = 1.0 / self.val
        inv2 = inv * inv
        outer = np.outer(self.grad, self.grad)
        return Jet2(inv, -inv2 * self.grad, -inv2 * self.hess + 2 * inv2 * inv * outer)

    def __pow__(self, alpha):
        if isinstance(alpha, int):
            if alpha < 0:
                return (self**-alpha)._reciprocal()
            result = Jet2(1.0)
            base, e = self, alpha
            while e:
                if e & 1:
                    result = result * base
                e >>= 1
                if e:
                    base = base * base
            return result
        # real exponent: requires a positive real value
        u = self.val.real
        f = u**alpha
        f1 = alpha * u ** (alpha - 1)
        f2 = alpha * (alpha - 1) * u ** (alpha - 2)
        outer = np.outer(self.grad, self.grad)
        return Jet2(f, f1 * self.grad, f1 * self.hess + f2 * outer)


def vigneras_p(k: int, pt: UpperHalfPoint, w):
    """The theta kernel (b^2-4ac)^(k-1/2) Q_z / Q(z,1)^(k+1), zero for b^2-4ac <= 0.

    Accepts a triple of floats or of Jet2 values; with jets the return
    value carries exact first and second derivatives.
    """
    a, b, c = w
    disc = b * b - 4 * a * c
    disc_val = disc.val.real if isinstance(disc, Jet2) else disc
    if disc_val <= 0:
        return Jet2(0.0) if isinstance(disc, Jet2) else 0.0
    x, y = pt.x, pt.y
    z = pt.z
    qz = (a * (x * x + y * y) + b * x + c) * (1.0 / y)
    qval = a * (z * z) + b * z + c
    return disc ** (k - 0.5) * qz * qval ** (-(k + 1))


def vigneras_residual(k: int, pt: UpperHalfPoint, w, delta: float = 1e-3) -> complex:
    """(E - Lap_A / 4 pi) p - (k-1) p at w, via exact jet differentiation.

    E is the Euler operator and Lap_A = -(1/2) d_a d_c + (1/2) d_b^2.
    Requires b^2 - 4ac > delta, away from the vanishing locus.
    """
    a, b, c = (float(t) for t in w)
    if b * b - 4 * a * c <= delta:
        raise ValueError(f"sample point has b^2-4ac = {b*b-4*a*c} <= {delta}")
    jets = (Jet2.variable(a, 0), Jet2.variable(b, 1), Jet2.variable(c, 2))
    p = vigneras_p(k, pt, jets)
    euler = a * p.grad[0] + b * p.grad[1] + c * p.grad[2]
    lap = -0.5 * p.hess[0, 2] + 0.5 * p.hess[1, 1]
    return euler - lap / (4 * math.pi) - (k - 1) * p.val


def discriminants_up_to(Dmax: int, include_square: bool = False) -> list[int]:
    """Positive discriminants (0 or 1 mod 4) up to Dmax, squares optional."""
    out = []
    for D in range(1, Dmax + 1):
        if D % 4 in (0, 1):
            r = math.isqrt(D)
            if r * r != D or include_square:
                out.append(D)
    return out


def _square_layer_sums(kind: str, k: int, D: int, x: float, y: float, R: float) -> complex:
    """Inner lattice sum over forms of square discriminant D with |Q(z,1)| <= R.

    Unlike the non-square case this includes the a = 0 family
    [0, +-sqrt(D), c], which contributes a pair of absolutely convergent
    one-dimensional sums.
    """
    s = math.isqrt(D)
    z = complex(x, y)
    aa, bb, cc = _box_arrays(D, x, y, R)
    total = 0j
    if len(aa):
        q = (aa * z + bb) * z + cc
        if kind == "f":
            total += _fsum_complex(1.0 / q**k)
        else:
            qz = (aa * (x * x + y * y) + bb * x + cc) / y
            total += _fsum_complex(qz / q ** (k + 1))
    half = math.sqrt(max(R * R - s * s * y * y, 0.0))
    for b0 in (s, -s):
        lo = math.ceil(-b0 * x - half)
        hi = math.floor(-b0 * x + half)
        c = np.arange(lo, hi + 1, dtype=np.int64)
        q = b0 * z + c
        if kind == "f":
            total += _fsum_complex(1.0 / q**k)
        else:
            qz = (b0 * x + c) / y
            total += _fsum_complex(qz / q ** (k + 1))
    return total


@lru_cache(maxsize=512)
def _square_layer(kind: str, k: int, D: int, x: float, y: float, tol: float) -> complex:
    """Adaptive evaluation of the square-discriminant layer, doubling as in series."""
    R = _initial_radius(D, x, y)
    rho = 2.0 ** (2 - k)
    geom = rho / (1.0 - rho)
    prev = None
    streak = 0
    value = 0j
    while R <= 1e7:
        value = _square_layer_sums(kind, k, D, x, y, R)
        if prev is not None:
            streak = streak + 1 if geom * abs(value - prev) <= tol else 0
            if streak >= 2:
                return value
        prev = value
        R *= 2
    raise ArithmeticError(f"square-discriminant layer D={D} did not converge")


@lru_cache(maxsize=64)
def _kernel_table(kind: str, k: int, x: float, y: float, Dmax: int, tol: float,
                  include_square: bool):
    """Coefficients D^(k-1/2) * inner(D) at z for the D-sum of a kernel."""
    pt = UpperHalfPoint(x, y)
    inner = {"f": f_hyperbolic, "omega": omega}[kind]
    table = []
    for D in discriminants_up_to(Dmax, include_square):
        r = math.isqrt(D)
        if r * r == D:
            val = _square_layer(kind, k, D, x, y, tol / max(1, Dmax))
        else:
            p = SeriesParams(k, D, tol / max(1, Dmax))
            val = inner(p, pt).value
        table.append((D, D ** (k - 0.5) * val))
    return tuple(table)


def _kernel_value(kind: str, k: int, tau: UpperHalfPoint, z: UpperHalfPoint,
                  Dmax: int, tol: float, include_square: bool) -> complex:
    table = _kernel_table(kind, k, z.x, z.y, Dmax, tol, include_square)
    total = 0j
    last = 0.0
    for D, coeff in table:
        term = coeff * cmath.exp(2j * math.pi * D * tau.z)
        total += term
        last = abs(term)
    if last > tol:
        raise InsufficientDepthError(
            f"last discriminant term {last:.3g} > tol {tol:.3g}; increase Dmax or Im tau"
        )
    return total


def omega_kernel(k: int, tau: UpperHalfPoint, z: UpperHalfPoint, Dmax: int,
                 tol: float = 1e-9, include_square: bool = True) -> complex:
    """sum over discriminants of D^(k-1/2) f_{k,D}(z) e^{2 pi i D tau}.

    The default sums the complete lattice, square discriminants included;
    modularity holds only for the complete sum.  include_square=False
    restricts to non-square layers (the span of the standalone series).
    """
    return _kernel_value("f", k, tau, z, Dmax, tol, include_square)


def lambda_kernel(k: int, tau: UpperHalfPoint, z: UpperHalfPoint, Dmax: int,
                  tol: float = 1e-9, include_square: bool = True) -> complex:
    """Same D-sum with the weak Maass values in place of the cusp-form values."""
    return _kernel_value("omega", k, tau, z, Dmax, tol, include_square)


def minimum_height(k: int, z: UpperHalfPoint, Dmax: int, tol: float = 1e-9,
                   include_square: bool = True) -> float:
    """Smallest Im tau at which the Dmax term of the kernel is below tol."""
    table = _kernel_table("omega", k, z.x, z.y, Dmax, tol, include_square)
    c_max = max((abs(c) / d ** (k - 0.5) for d, c in table), default=1.0)
    # require Dmax^(k-1/2) * c_max * exp(-2 pi Dmax v) < tol
    return math.log(max(Dmax ** (k - 0.5) * c_max / tol, 1.000001)) / (2 * math.pi * Dmax)


def plus_space_violations(k: int, z: UpperHalfPoint, v: float, Dmax: int,
                          tol: float = 1e-9, nodes: int = 256) -> list[int]:
    """Indices n = 2, 3 mod 4 up to Dmax whose Fourier coefficient exceeds tol.

    Coefficients of the Maass-kernel section in tau are measured at height
    v by the trapezoid rule (exact for trigonometric polynomials of degree
    below nodes/2).  The plus-space property predicts an empty list.
    """
    if nodes <= 2 * Dmax:
        raise ValueError("node count must exceed twice the extraction range")
    bad = []
    samples = [
        lambda_kernel(k, UpperHalfPoint(jn / nodes, v), z, Dmax, tol, include_square=True)
        for jn in range(nodes)
    ]
    for n in range(1, Dmax + 1):
        if n % 4 not in (2, 3):
            continue
        acc = 0j
        for jn, val in enumerate(samples):
            acc += val * cmath.exp(-2j * math.pi * n * jn / nodes)
        coeff = acc / nodes
        if abs(coeff) > tol:
            bad.append(n)
    return bad


def half_integral_modularity_residual(k: int, g: GroupElement, tau: UpperHalfPoint,
                                      z: UpperHalfPoint, Dmax: int,
                                      tol: float = 1e-9) -> float:
    """|(Lambda |_{k+1/2} g)(tau) - Lambda(tau)| for the kernel section at z.

    Uses the complete lattice sum (square layers included), for which the
    transformation is exact.  Both tau and g tau must satisfy the height
    requirement for the D-truncation; on the isometric circle
    |c tau + d| = 1 the two heights agree.
    """
    v_min = minimum_height(k, z, Dmax, tol)
    g_tau_im = tau.v / abs(g.c * tau.z + g.d) ** 2
    if tau.v < v_min or g_tau_im < v_min:
        raise InsufficientDepthError(
            f"heights {tau.v:.3g}, {g_tau_im:.3g} below the truncation floor {v_min:.3g}"
        )
    F = lambda t: lambda_kernel(k, t, z, Dmax, tol)
    return abs(slash(k + 0.5, g, F, tau) - F(tau))
