"""Point evaluators with certified truncation for the central series.

The weight-2k cusp form summing 1/Q(z,1)^k over all forms of fixed
discriminant, its weak Maass companion weighted by the geodesic
invariant, the holomorphic part of the splitting, the completed
weight-2 Eisenstein series, the generating function of the Faber basis
with its closed form, the two divisor-form formulas, and integral-weight
Poincare series of exponential type.

Truncation is by the size of |Q(z,1)|: the radius doubles until two
successive shells agree within tolerance, and the reported tail bound
extrapolates the last shell geometrically (shell ratio 2^(2-k)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from . import qseries
from .qforms import UpperHalfPoint, validate_discriminant, _enumerate_arrays

__all__ = [
    "SeriesParams",
    "TruncatedValue",
    "NonConvergedError",
    "IllConditionedError",
    "PoleError",
    "f_hyperbolic",
    "omega",
    "holomorphic_part",
    "f_derivative",
    "frozen_form_sum",
    "e2_star",
    "h_generating",
    "akn_closed_form",
    "divisor_form_bko",
    "divisor_form_thm",
    "first_fourier_coefficient",
    "poincare_exponential",
]


class NonConvergedError(ArithmeticError):
    """Adaptive truncation exhausted its resource budget above tolerance."""


class IllConditionedError(ArithmeticError):
    """Quotient by a near-zero of the cusp form; the point must be skipped."""


class PoleError(ArithmeticError):
    """Evaluation at (a point equivalent to) a pole of the closed form."""


@dataclass(frozen=True)
class SeriesParams:
    """Weight parameter k (even, > 2), discriminant D, target accuracy."""

    k: int
    D: int
    tol: float = 1e-8

    def __post_init__(self):
        if self.k <= 2 or self.k % 2 != 0:
            raise ValueError(f"k must be an even integer greater than 2, got {self.k}")
        validate_discriminant(self.D)
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class TruncatedValue:
    value: complex
    tail_bound: float
    radius_used: float
    converged: bool


def _fsum_complex(arr) -> complex:
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def _raw_sums(k: int, D: int, x: float, y: float, R: float):
    """Compensated sums of 1/Q^k, Q_z/Q^(k+1) and -i Q'/Q^(k+1) over |Q| <= R."""
    aa, bb, cc = _enumerate_arrays(D, x, y, R)
    n = len(aa)
    if n == 0:
        return 0j, 0j, 0j, 0
    z = complex(x, y)
    q = (aa * z + bb) * z + cc
    qz = (aa * (x * x + y * y) + bb * x + cc) / y
    qp = 2 * aa * z + bb
    inv_k = 1.0 / q**k
    inv_k1 = inv_k / q
    f = _fsum_complex(inv_k)
    om = _fsum_complex(qz * inv_k1)
    hol = _fsum_complex(-1j * qp * inv_k1)
    return f, om, hol, n


def _initial_radius(D: int, x: float, y: float) -> float:
    # large enough to contain forms near the minimum of |Q(z,1)|
    return max(
        6.0 * math.sqrt(D) * (y + 1.0 / y),
        2.0 * (x * x + y * y) + 2.0 * abs(x) * y + 4.0,
        10.0,
    )


@lru_cache(maxsize=256)
def _bundle(k: int, D: int, x: float, y: float, tol: float):
    """Adaptive lockstep evaluation of f, omega and the holomorphic part."""
    R = _initial_radius(D, x, y)
    rho = 2.0 ** (2 - k)
    geom = rho / (1.0 - rho)
    prev = None
    good_streak = 0
    tails = (math.inf, math.inf, math.inf)
    sums = (0j, 0j, 0j)
    count = 0
    max_radius = 1e7
    while R <= max_radius:
        f, om, hol, count = _raw_sums(k, D, x, y, R)
        sums = (f, om, hol)
        if prev is not None and count > 0:
            tails = tuple(geom * abs(s - p) for s, p in zip(sums, prev))
            good_streak = good_streak + 1 if max(tails) <= tol else 0
            if good_streak >= 2:
                return sums, tails, R, True
        prev = sums
        R *= 2
    return sums, tails, R / 2, False


def _components(p: SeriesParams, pt: UpperHalfPoint):
    sums, tails, R, ok = _bundle(p.k, p.D, pt.x, pt.y, p.tol)
    return [TruncatedValue(s, t, R, ok) for s, t in zip(sums, tails)]


def f_hyperbolic(p: SeriesParams, pt: UpperHalfPoint) -> TruncatedValue:
    """sum over forms of discriminant D of Q(z,1)^(-k); a weight-2k cusp form."""
    return _components(p, pt)[0]


def omega(p: SeriesParams, pt: UpperHalfPoint) -> TruncatedValue:
    """sum of Q_z / Q(z,1)^(k+1); pole-free, weight 2k+2, Laplace eigenvalue 2k."""
    return _components(p, pt)[1]


def holomorphic_part(p: SeriesParams, pt: UpperHalfPoint) -> TruncatedValue:
    """-i sum of Q'(z,1) / Q(z,1)^(k+1), the holomorphic piece of the splitting."""
    return _components(p, pt)[2]


def f_derivative(p: SeriesParams, pt: UpperHalfPoint) -> TruncatedValue:
    """d/dz of the cusp form, summed termwise: -k sum Q'/Q^(k+1)."""
    hol = _components(p, pt)[2]
    # -k * Q'/Q^(k+1) = -k * i * (-i Q'/Q^(k+1))
    return TruncatedValue(-1j * p.k * hol.value, p.k * hol.tail_bound,
                          hol.radius_used, hol.converged)


def frozen_form_sum(p: SeriesParams, center: UpperHalfPoint, which: str = "omega"):
    """A smooth evaluator: the fixed finite sum over forms enumerated at center.

    Freezing the form set removes the set discontinuities of adaptive
    truncation, so the result can be differentiated numerically.  The
    evaluator approximates the full series to the tail bound at center.
    """
    bundle = _bundle(p.k, p.D, center.x, center.y, p.tol)
    R = bundle[2]
    aa, bb, cc = _enumerate_arrays(p.D, center.x, center.y, R)
    k = p.k
    if which == "f":
        def evaluator(pt: UpperHalfPoint) -> complex:
            z = pt.z
            q = (aa * z + bb) * z + cc
            return _fsum_complex(1.0 / q**k)
    elif which == "omega":
        def evaluator(pt: UpperHalfPoint) -> complex:
            z, x, y = pt.z, pt.x, pt.y
            q = (aa * z + bb) * z + cc
            qz = (aa * (x * x + y * y) + bb * x + cc) / y
            return _fsum_complex(qz / q ** (k + 1))
    else:
        raise ValueError(f"unknown component {which!r}")
    return evaluator


def e2_star(pt: UpperHalfPoint, N: int = qseries.DEFAULT_PRECISION) -> complex:
    """E_2(z) - 3/(pi y), the completed weight-2 Eisenstein series."""
    return qseries.evaluate_q(qseries.eisenstein(2, N), pt, tol=1e-10) - 3.0 / (math.pi * pt.y)


def _faber_precision(n: int, y: float) -> int:
    # coefficients of the n-th Faber function start decaying around 4n/y^2
    return max(qseries.DEFAULT_PRECISION, int(4 * n / (y * y)) + 96)


def h_generating_with_tail(z: UpperHalfPoint, tau: UpperHalfPoint, N: int) -> tuple[complex, float]:
    """sum_{n <= N} j_n(z) e^{2 pi i n tau} and a geometric bound on the dropped tail.

    Convergent for Im tau > Im z, where term n decays like
    e^{-2 pi n (Im tau - Im z)}.
    """
    if tau.v <= z.y:
        raise ValueError(f"need Im tau > Im z, got {tau.v} <= {z.y}")
    prec = _faber_precision(N, z.y)
    total = 0j
    terms = []
    for n in range(N + 1):
        jn = qseries.evaluate_q(qseries.faber(n, prec), z, tol=1e-9)
        t = jn * cmath.exp(2j * math.pi * n * tau.z)
        terms.append(abs(t))
        total += t
    ratio = math.exp(-2 * math.pi * (tau.v - z.y))
    scale = max(max(terms[n] / ratio**n for n in range(max(0, N - 2), N + 1)), 1.0)
    tail = scale * ratio ** (N + 1) / (1 - ratio)
    return total, tail


def h_generating(z: UpperHalfPoint, tau: UpperHalfPoint, N: int) -> complex:
    return h_generating_with_tail(z, tau, N)[0]


def akn_closed_form(z: UpperHalfPoint, tau: UpperHalfPoint,
                    N: int = qseries.DEFAULT_PRECISION) -> complex:
    """(q d/dq j)(tau) / (j(z) - j(tau)); rejects evaluation at the pole."""
    if tau.v <= z.y:
        raise ValueError(f"need Im tau > Im z, got {tau.v} <= {z.y}")
    j = qseries.klein_j(N)
    jz = qseries.evaluate_q(j, z, tol=1e-8)
    jtau = qseries.evaluate_q(j, tau, tol=1e-8)
    denom = jz - jtau
    if abs(denom) < 1e-6 * (1 + abs(jz) + abs(jtau)):
        raise PoleError(f"j(z) = j(tau) = {jz:.6g}: the two points are equivalent")
    jprime = qseries.evaluate_q(j.derivative(), tau, tol=1e-8)
    return jprime / denom


def divisor_form_bko(p: SeriesParams, pt: UpperHalfPoint) -> complex:
    """(k/6) E_2 - (1/2 pi i) f'/f, the logarithmic-derivative divisor formula."""
    f, _, hol = _components(p, pt)
    _require_conditioned(f, p)
    fprime = -1j * p.k * hol.value
    e2 = qseries.evaluate_q(qseries.eisenstein(2, qseries.DEFAULT_PRECISION), pt, tol=1e-10)
    return p.k / 6.0 * e2 - fprime / (2j * math.pi * f.value)


def divisor_form_thm(p: SeriesParams, pt: UpperHalfPoint) -> complex:
    """(k/2 pi) omega/f + (k/6) E_2^*, the weak-Maass divisor formula."""
    f, om, _ = _components(p, pt)
    _require_conditioned(f, p)
    return p.k / (2 * math.pi) * om.value / f.value + p.k / 6.0 * e2_star(pt)


def _require_conditioned(f: TruncatedValue, p: SeriesParams) -> None:
    if abs(f.value) <= p.tol * 1e3:
        raise IllConditionedError(
            f"|f| = {abs(f.value):.3g} is too close to a zero for a stable quotient"
        )


def first_fourier_coefficient(p: SeriesParams, y: float = 1.0, nodes: int = 64,
                              nmax: int = 12) -> tuple[int, complex]:
    """Index and value of the first Fourier coefficient exceeding the noise floor.

    Scans n = 1, 2, ... of the expansion at height y and returns the first
    with |c| > 1e-8 * max(1, |c(1)|).
    """
    coeffs = []
    for n in range(1, nmax + 1):
        acc = 0j
        for jn in range(nodes):
            x = jn / nodes
            fv = f_hyperbolic(p, UpperHalfPoint(x, y)).value
            acc += fv * cmath.exp(-2j * math.pi * n * x)
        coeffs.append(acc / nodes * math.exp(2 * math.pi * n * y))
    floor = 1e-8 * max(1.0, abs(coeffs[0]))
    for n, c in enumerate(coeffs, start=1):
        if abs(c) > floor:
            return n, c
    raise NonConvergedError(f"no Fourier coefficient above {floor:.3g} up to index {nmax}")


def _coprime_window(c: int, x: float, halfwidth: int):
    center = -c * x
    lo = math.ceil(center - halfwidth)
    hi = math.floor(center + halfwidth)
    for d in range(lo, hi + 1):
        if math.gcd(c, d) == 1:
            yield d


def poincare_exponential(kappa: int, m: int, pt: UpperHalfPoint, Cmax: int,
                         tol: float = 1e-8) -> complex:
    """Poincare series of exponential type, truncated over cosets with c <= Cmax.

    Sums e^{2 pi i m gz} j(g,z)^(-kappa) over representatives of cosets of
    the translations; (a, b) completes (c, d) by the extended Euclid
    identity.  The magnitude of the last shell c = Cmax estimates the tail.
    """
    if kappa % 2 != 0 or kappa < 8:
        raise ValueError(f"weight must be even and at least 8, got {kappa}")
    if m < 1:
        raise ValueError("only the cusp-form range m >= 1 is supported")
    z = pt.z
    total = cmath.exp(2j * math.pi * m * z)
    halfwidth = max(12, int(math.ceil((8.0 / (tol * (kappa - 1))) ** (1.0 / (kappa - 1)))),
                    int(math.ceil(3 * pt.y)) + 4)
    last_shell = 0.0
    for c in range(1, Cmax + 1):
        shell = 0.0
        for d in _coprime_window(c, pt.x, halfwidth):
            u, v = _bezout(c, d)  # u*c + v*d = 1
            a, b = v, -u  # then a*d - b*c = 1
            j = c * z + d
            gz = (a * z + b) / j
            term = j ** (-kappa) * cmath.exp(2j * math.pi * m * gz)
            total += term
            shell += abs(term)
        last_shell = shell
    if last_shell > tol:
        raise NonConvergedError(
            f"last coset shell contributes {last_shell:.3g} > tol; increase Cmax"
        )
    return total


def _bezout(c: int, d: int) -> tuple[int, int]:
    """(u, v) with u*c + v*d = gcd(c, d)."""
    old_r, r = c, d
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_u, u = u, old_u - qt * u
        old_v, v = v, old_v - qt * v
    if old_r < 0:
        old_u, old_v = -old_u, -old_v
    return old_u, old_v
