"""Slash operators and numerical hyperbolic differential operators.

Covers the Kronecker symbol and theta multiplier needed for
half-integral weight, the antiholomorphic Wirtinger derivative by
Richardson-extrapolated central differences, and the weight-kappa
hyperbolic Laplacian in expanded second-order form.
"""

from __future__ import annotations

import cmath
from typing import Callable

from .qforms import GroupElement, UpperHalfPoint, mobius

__all__ = [
    "SmoothFunction",
    "RoughFunctionError",
    "kronecker",
    "eps",
    "slash",
    "wirtinger_dzbar",
    "xi",
    "laplacian",
]

SmoothFunction = Callable[[UpperHalfPoint], complex]

# default step policy; Richardson across h and h/2 is always applied
FIRST_ORDER_STEP = 1e-3
SECOND_ORDER_STEP = 5e-3


class RoughFunctionError(ArithmeticError):
    """Difference quotients at steps h and h/2 disagree beyond tolerance."""


def kronecker(c: int, d: int) -> int:
    """Extended Kronecker symbol (c/d) for arbitrary integers."""
    if d == 0:
        return 1 if abs(c) == 1 else 0
    result = 1
    if d < 0:
        d = -d
        if c < 0:
            result = -result
    while d % 2 == 0:
        d //= 2
        if c % 2 == 0:
            return 0
        if c % 8 in (3, 5):
            result = -result
    # Jacobi symbol loop, d odd positive
    c %= d
    while c:
        while c % 2 == 0:
            c //= 2
            if d % 8 in (3, 5):
                result = -result
        c, d = d, c
        if c % 4 == 3 and d % 4 == 3:
            result = -result
        c %= d
    return result if d == 1 else 0


def eps(d: int) -> complex:
    """1 for d = 1 mod 4, i for d = 3 mod 4; defined for odd d only."""
    if d % 2 == 0:
        raise ValueError(f"eps is defined for odd integers, got {d}")
    return 1 if d % 4 == 1 else 1j


def _half_integral_parts(kappa) -> tuple[int, bool]:
    two = 2 * kappa
    two_int = round(two)
    if abs(two - two_int) > 1e-12:
        raise ValueError(f"weight must be integral or half-integral, got {kappa}")
    return two_int, two_int % 2 == 1


def slash(kappa, g: GroupElement, F: SmoothFunction, pt: UpperHalfPoint) -> complex:
    """(F |_kappa g)(z).

    Integral weight: j(g,z)^(-kappa) F(gz).  Half-integral weight needs
    g in Gamma_0(4) and multiplies by (c/d) eps_d^(2 kappa); the power
    j^(-kappa) uses the principal branch after normalizing the
    representative to d > 0 (d = 1 when c = 0).
    """
    two_kappa, half = _half_integral_parts(kappa)
    if not half:
        k = two_kappa // 2
        j = g.c * pt.z + g.d
        return j ** (-k) * F(mobius(g, pt))
    if g.c % 4 != 0:
        raise ValueError("half-integral weight slash requires g in Gamma_0(4)")
    if (g.c != 0 and g.d < 0) or (g.c == 0 and g.d < 0):
        g = -g
    j = g.c * pt.z + g.d
    mult = kronecker(g.c, g.d) * eps(g.d) ** two_kappa
    return mult * cmath.exp(-kappa * cmath.log(j)) * F(mobius(g, pt))


def _dx(F, pt: UpperHalfPoint, h: float) -> complex:
    x, y = pt.x, pt.y
    return (
        -F(UpperHalfPoint(x + 2 * h, y))
        + 8 * F(UpperHalfPoint(x + h, y))
        - 8 * F(UpperHalfPoint(x - h, y))
        + F(UpperHalfPoint(x - 2 * h, y))
    ) / (12 * h)


def _dy(F, pt: UpperHalfPoint, h: float) -> complex:
    x, y = pt.x, pt.y
    return (
        -F(UpperHalfPoint(x, y + 2 * h))
        + 8 * F(UpperHalfPoint(x, y + h))
        - 8 * F(UpperHalfPoint(x, y - h))
        + F(UpperHalfPoint(x, y - 2 * h))
    ) / (12 * h)


def wirtinger_dzbar(F: SmoothFunction, pt: UpperHalfPoint, h: float | None = None,
                    rough_tol: float = 1e-2) -> complex:
    """d/dzbar F = (F_x + i F_y) / 2 by fourth-order differences.

    Richardson extrapolation combines steps h and h/2; their raw
    disagreement beyond rough_tol (relative) flags a rough evaluator.
    """
    if h is None:
        h = FIRST_ORDER_STEP * max(1.0, pt.y)
    coarse = (_dx(F, pt, h) + 1j * _dy(F, pt, h)) / 2
    fine = (_dx(F, pt, h / 2) + 1j * _dy(F, pt, h / 2)) / 2
    value = (16 * fine - coarse) / 15
    if abs(fine - coarse) > rough_tol * (1 + abs(value)):
        raise RoughFunctionError(
            f"step-halving disagreement {abs(fine - coarse):.3g} at z={pt.z}; evaluator looks rough"
        )
    return value


def xi(kappa, F: SmoothFunction, pt: UpperHalfPoint, h: float | None = None) -> complex:
    """2 i y^kappa conj(d/dzbar F)."""
    return 2j * pt.y ** float(kappa) * wirtinger_dzbar(F, pt, h).conjugate()


def _laplacian_once(kappa, F, pt: UpperHalfPoint, h: float) -> complex:
    x, y = pt.x, pt.y
    f0 = F(pt)
    fx1, fx2 = F(UpperHalfPoint(x + h, y)), F(UpperHalfPoint(x + 2 * h, y))
    fx_1, fx_2 = F(UpperHalfPoint(x - h, y)), F(UpperHalfPoint(x - 2 * h, y))
    fy1, fy2 = F(UpperHalfPoint(x, y + h)), F(UpperHalfPoint(x, y + 2 * h))
    fy_1, fy_2 = F(UpperHalfPoint(x, y - h)), F(UpperHalfPoint(x, y - 2 * h))
    fxx = (-fx2 + 16 * fx1 - 30 * f0 + 16 * fx_1 - fx_2) / (12 * h * h)
    fyy = (-fy2 + 16 * fy1 - 30 * f0 + 16 * fy_1 - fy_2) / (12 * h * h)
    fx = (-fx2 + 8 * fx1 - 8 * fx_1 + fx_2) / (12 * h)
    fy = (-fy2 + 8 * fy1 - 8 * fy_1 + fy_2) / (12 * h)
    return -y * y * (fxx + fyy) + 1j * kappa * y * (fx + 1j * fy)


def laplacian(kappa, F: SmoothFunction, pt: UpperHalfPoint, h: float | None = None) -> complex:
    """Weight-kappa hyperbolic Laplacian -y^2(F_xx+F_yy) + i kappa y (F_x + i F_y)."""
    if h is None:
        h = SECOND_ORDER_STEP * max(1.0, pt.y)
    coarse = _laplacian_once(kappa, F, pt, h)
    fine = _laplacian_once(kappa, F, pt, h / 2)
    return (16 * fine - coarse) / 15
