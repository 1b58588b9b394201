"""Truncated Laurent series in q with exact integer/rational coefficients.

Eisenstein series, the discriminant cusp form, Klein's invariant, the
Faber basis of modular functions with principal part q^{-n}, exact ring
arithmetic, and numerical evaluation with a geometric tail bound.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .qforms import UpperHalfPoint

__all__ = [
    "LaurentQSeries",
    "InsufficientPrecisionError",
    "eisenstein",
    "delta",
    "klein_j",
    "faber",
    "evaluate_q",
    "evaluate_q_with_tail",
]

DEFAULT_PRECISION = 64


class InsufficientPrecisionError(ArithmeticError):
    """Tail bound of a numerical series evaluation exceeds the requested tolerance."""


def _simplify(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class LaurentQSeries:
    """sum of c_n q^n for valuation <= n < precision, coefficients exact.

    Arithmetic truncates to the minimum effective precision of the
    operands and never zero-pads unknown coefficients.
    """

    __slots__ = ("valuation", "coeffs", "precision")

    def __init__(self, valuation: int, coeffs, precision: int):
        coeffs = [_simplify(c) for c in coeffs]
        # trim exact leading zeros so the leading coefficient is nonzero
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            valuation += 1
        while coeffs and coeffs[-1] == 0 and valuation + len(coeffs) > precision:
            coeffs.pop()
        if not coeffs:
            valuation = precision
        if valuation + len(coeffs) > precision:
            coeffs = coeffs[: precision - valuation]
        self.valuation = valuation
        self.coeffs = tuple(coeffs)
        self.precision = precision

    @classmethod
    def constant(cls, value, precision: int) -> "LaurentQSeries":
        return cls(0, [value], precision)

    @classmethod
    def zero(cls, precision: int) -> "LaurentQSeries":
        return cls(precision, [], precision)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, n: int):
        if n >= self.precision:
            raise IndexError(f"coefficient of q^{n} is beyond precision {self.precision}")
        if n < self.valuation or n >= self.valuation + len(self.coeffs):
            return 0
        return self.coeffs[n - self.valuation]

    def items(self):
        for i, c in enumerate(self.coeffs):
            yield self.valuation + i, c

    def __eq__(self, other):
        if not isinstance(other, LaurentQSeries):
            return NotImplemented
        lo = min(self.valuation, other.valuation)
        hi = min(self.precision, other.precision)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(lo, hi))

    def __neg__(self):
        return LaurentQSeries(self.valuation, [-c for c in self.coeffs], self.precision)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentQSeries.constant(other, self.precision)
        prec = min(self.precision, other.precision)
        if self.is_zero():
            return LaurentQSeries(other.valuation, other.coeffs, prec)
        if other.is_zero():
            return LaurentQSeries(self.valuation, self.coeffs, prec)
        lo = min(self.valuation, other.valuation)
        out = [self.coefficient(n) + other.coefficient(n) for n in range(lo, prec)]
        return LaurentQSeries(lo, out, prec)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentQSeries.constant(other, self.precision)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentQSeries(
                self.valuation, [c * other for c in self.coeffs], self.precision
            )
        if self.is_zero() or other.is_zero():
            return LaurentQSeries.zero(min(self.precision, other.precision))
        prec = min(self.precision + other.valuation, other.precision + self.valuation)
        val = self.valuation + other.valuation
        n_out = prec - val
        out = [0] * n_out
        for i, ci in enumerate(self.coeffs):
            if ci == 0:
                continue
            jmax = min(len(other.coeffs), n_out - i)
            for j in range(jmax):
                cj = other.coeffs[j]
                if cj:
                    out[i + j] += ci * cj
        return LaurentQSeries(val, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("series powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentQSeries.constant(1, self.precision - 0)
        base = self
        e = n
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> "LaurentQSeries":
        """Multiplicative inverse; precision drops to N - 2*valuation."""
        if self.is_zero():
            raise ZeroDivisionError("cannot invert the zero series")
        v = self.valuation
        length = len(self.coeffs)
        a0 = Fraction(self.coeffs[0])
        inv0 = 1 / a0
        out = [inv0] + [Fraction(0)] * (length - 1)
        for n in range(1, length):
            acc = Fraction(0)
            for i in range(1, min(n, length - 1) + 1):
                ci = self.coeffs[i]
                if ci:
                    acc += ci * out[n - i]
            out[n] = -acc * inv0
        return LaurentQSeries(-v, out, self.precision - 2 * v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    def derivative(self) -> "LaurentQSeries":
        """q d/dq, which is (1/2 pi i) d/dz."""
        out = [(self.valuation + i) * c for i, c in enumerate(self.coeffs)]
        return LaurentQSeries(self.valuation, out, self.precision)

    def assert_integral(self) -> "LaurentQSeries":
        for n, c in self.items():
            if isinstance(c, Fraction) and c.denominator != 1:
                raise ArithmeticError(f"coefficient of q^{n} is not an integer: {c}")
        return self

    def table(self) -> str:
        """Golden-file format: one 'n:coefficient' line per known coefficient."""
        return "\n".join(f"{n}:{c}" for n, c in self.items())

    def __repr__(self):
        head = ", ".join(f"q^{n}:{c}" for n, c in list(self.items())[:4])
        return f"LaurentQSeries({head}, ... O(q^{self.precision}))"


def _sigma_table(power: int, N: int) -> list[int]:
    sig = [0] * N
    for d in range(1, N):
        dp = d**power
        for m in range(d, N, d):
            sig[m] += dp
    return sig


@lru_cache(maxsize=None)
def eisenstein(weight: int, N: int = DEFAULT_PRECISION) -> LaurentQSeries:
    """E_2, E_4 or E_6 normalized to constant term 1."""
    if N < 1:
        raise ValueError("precision must be at least 1")
    factors = {2: -24, 4: 240, 6: -504}
    if weight not in factors:
        raise ValueError(f"unsupported Eisenstein weight {weight}")
    sig = _sigma_table(weight - 1, N)
    coeffs = [factors[weight] * s for s in sig]
    coeffs[0] = 1
    return LaurentQSeries(0, coeffs, N)


@lru_cache(maxsize=None)
def delta(N: int = DEFAULT_PRECISION) -> LaurentQSeries:
    """The weight-12 cusp form (E_4^3 - E_6^2) / 1728 = q - 24 q^2 + ..."""
    e4 = eisenstein(4, N + 1)
    e6 = eisenstein(6, N + 1)
    d = (e4**3 - e6**2) / 1728
    d = LaurentQSeries(d.valuation, d.coeffs, min(d.precision, N + 1))
    return d.assert_integral()


@lru_cache(maxsize=None)
def klein_j(N: int = DEFAULT_PRECISION) -> LaurentQSeries:
    """q^{-1} + 744 + 196884 q + ..."""
    e4 = eisenstein(4, N + 3)
    j = e4**3 * delta(N + 3).inverse()
    return j.assert_integral()


@lru_cache(maxsize=None)
def _faber_chain(n: int, N: int) -> tuple[LaurentQSeries, ...]:
    base = N + n + 4
    j1 = klein_j(base) - 744
    chain = [LaurentQSeries.constant(1, j1.precision), j1]
    for m in range(2, n + 1):
        r = j1 * chain[m - 1]
        for i in range(m - 1, 0, -1):
            r = r - r.coefficient(-i) * chain[i]
        r = r - r.coefficient(0)
        assert r.coefficient(-m) == 1
        chain.append(r.assert_integral())
    return tuple(chain)


def faber(n: int, N: int = DEFAULT_PRECISION) -> LaurentQSeries:
    """The unique level-one modular function with expansion q^{-n} + O(q)."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    return _faber_chain(n, N)[n]


def _log_abs(c) -> float:
    # math.log accepts arbitrarily large Python ints
    if isinstance(c, int):
        return math.log(abs(c))
    return math.log(abs(c.numerator)) - math.log(c.denominator)


def _growth_rate(series: LaurentQSeries) -> float:
    """Geometric rate g with |c_n| <= g^n for all n >= precision.

    Uses max of |c_n|^(1/n) over the top half of the known range; valid
    for the sub-exponential coefficient growth of every series built here
    (|c_n|^(1/n) is eventually decreasing).
    """
    g = 1.0
    start = max(1, series.precision // 2)
    for n, c in series.items():
        if n < start or c == 0:
            continue
        g = max(g, math.exp(_log_abs(c) / n))
    return g


def _term(c, n: int, z: complex) -> complex:
    w = 2j * math.pi * n * z
    big = isinstance(c, int) and abs(c).bit_length() > 1000
    if not big:
        return float(c) * cmath.exp(w)
    # magnitude overflows a float: fold it into the exponent
    sign = 1.0 if c > 0 else -1.0
    return sign * cmath.exp(w + _log_abs(c))


def evaluate_q_with_tail(series: LaurentQSeries, pt: UpperHalfPoint) -> tuple[complex, float]:
    """Numerical value at z together with a geometric bound on the dropped tail."""
    z = pt.z
    total = 0.0 + 0.0j
    for n, c in series.items():
        if c != 0:
            total += _term(c, n, z)
    absq = math.exp(-2 * math.pi * pt.y)
    g = _growth_rate(series)
    r = g * absq
    if r >= 1:
        return total, math.inf
    N = series.precision
    log_tail = N * (math.log(g) + math.log(absq)) - math.log1p(-r)
    tail = 2.0 * math.exp(log_tail) if log_tail > -700 else 0.0
    return total, tail


def evaluate_q(series: LaurentQSeries, pt: UpperHalfPoint, tol: float | None = None) -> complex:
    """Value at z; raises if the tail bound exceeds the caller's tolerance."""
    value, tail = evaluate_q_with_tail(series, pt)
    if tol is not None and tail > tol:
        raise InsufficientPrecisionError(
            f"tail bound {tail:.3g} exceeds tolerance {tol:.3g} at y={pt.y}; increase precision"
        )
    return value
