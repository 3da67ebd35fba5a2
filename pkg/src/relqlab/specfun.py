"""Special-function evaluators and quadrature oracles for the short-time kernel.

The central object is the dimensionless kernel moment

    M_n(eps0) = eps0^(2n+1/2) * Int_C  (u(2-u))^n u^(-1/2) exp(-i eps0 + i u eps0) du

taken over the contour C = (0, 1] followed by the rotated ray u = 1 + i w,
w in [0, inf).  On the rotated ray the integrand decays like exp(-w eps0),
which is what makes the superluminal half of the velocity integral
convergent.  The same moment has the closed form

    M_n(eps0) = i^(1/2) exp(-i eps0) Gamma(2n + 1/2) M(-n, 1/2 - 2n, 2i eps0)

with M(a, b, z) the confluent hypergeometric function of the first kind,
here always a terminating polynomial because a = -n.  Both routes are
implemented independently so each certifies the other.

Conventions: i^(1/2) is the principal branch exp(i pi/4); half-integer
Gamma values are produced by the exact recurrence from Gamma(1/2) = sqrt(pi).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

EULER_GAMMA = float(np.euler_gamma)
SQRT_I = complex(np.exp(0.25j * np.pi))

MAX_MOMENT_ORDER = 12  # Gamma(2n + 1/2) overflow guard; only small n occur

_KUMMER_Z_GUARD = 50.0
_KUMMER_MAX_TERMS = 2000


class QuadratureConvergenceError(RuntimeError):
    """Adaptive refinement exhausted its budget without converging."""


@dataclass(frozen=True)
class MomentQuery:
    """Order and dimensionless time for one kernel moment.

    eps0 is the propagation interval measured in Compton times.
    """

    n: int
    eps0: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValueError(f"moment order n must be a non-negative integer, got {self.n!r}")
        if self.n > MAX_MOMENT_ORDER:
            raise ValueError(f"moment order n={self.n} exceeds cap {MAX_MOMENT_ORDER}")
        if not (self.eps0 > 0.0 and math.isfinite(self.eps0)):
            raise ValueError(f"eps0 must be positive and finite, got {self.eps0!r}")


def gamma_half_integer(k):
    """Gamma(k + 1/2) for integer k >= 0 by the exact recurrence from sqrt(pi)."""
    if k < 0 or k != int(k):
        raise ValueError(f"gamma_half_integer expects a non-negative integer, got {k!r}")
    value = math.sqrt(math.pi)
    for j in range(int(k)):
        value *= j + 0.5
    return value


def _is_nonpositive_integer(x) -> bool:
    return float(x) == int(x) and float(x) <= 0.0


def kummer_m(a, b, z):
    """Confluent hypergeometric M(a, b, z) = sum_k (a)_k / (b)_k z^k / k!.

    Terminates exactly after n + 1 terms when a = -n is a non-positive
    integer; that is the only case the kernel moments need.  Non-terminating
    parameter sets are accepted only inside the |z| <= 50 convergence guard.
    """
    z = complex(z)
    if _is_nonpositive_integer(a):
        n = int(-float(a))
        if _is_nonpositive_integer(b) and int(-float(b)) < n:
            raise ValueError(
                f"kummer_m: b={b} is a non-positive integer hit before the series "
                f"terminates at k={n}"
            )
        total = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for k in range(n):
            term *= (a + k) * z / ((b + k) * (k + 1))
            total += term
        return total

    if _is_nonpositive_integer(b):
        raise ValueError(f"kummer_m: non-terminating series with non-positive integer b={b}")
    if abs(z) > _KUMMER_Z_GUARD:
        raise ValueError(
            f"kummer_m: non-terminating case restricted to |z| <= {_KUMMER_Z_GUARD}, got |z|={abs(z):.3g}"
        )
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(_KUMMER_MAX_TERMS):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise QuadratureConvergenceError("kummer_m series did not converge within the term budget")


def bessel_j1_y1_small(eps0):
    """Small-argument J1/Y1: truncated expansions plus an independent reference.

    Returns (j1, y1, j1_ref, y1_ref).  The first pair is the truncated form

        J1(eps0) ~ eps0/2
        Y1(eps0) ~ -2/(pi eps0) + eps0 (-1 + 2 gamma_E - 2 ln 2 + 2 ln eps0)/(2 pi)

    whose eps0*ln(eps0) term is the obstruction to an integer-power expansion.
    The reference pair comes from the ascending series summed to machine
    convergence, kept independent of the truncation it checks.
    """
    if not (0.0 < eps0 < 0.5):
        raise ValueError(f"bessel_j1_y1_small requires 0 < eps0 < 0.5, got {eps0!r}")

    j1_trunc = 0.5 * eps0
    y1_trunc = -2.0 / (math.pi * eps0) + eps0 * (
        -1.0 + 2.0 * EULER_GAMMA - 2.0 * math.log(2.0) + 2.0 * math.log(eps0)
    ) / (2.0 * math.pi)

    # Ascending series (Abramowitz & Stegun 9.1.10/9.1.11 at order one).
    half = 0.5 * eps0
    j1_ref = 0.0
    term = half  # k = 0 term of sum (-1)^k / (k! (k+1)!) half^{2k+1}
    k = 0
    while True:
        j1_ref += term
        nxt = -term * half * half / ((k + 1) * (k + 2))
        if abs(nxt) <= 1e-18 * abs(j1_ref):
            break
        term = nxt
        k += 1

    psi1 = -EULER_GAMMA  # digamma(1)
    psi2 = 1.0 - EULER_GAMMA
    series = 0.0
    coeff = half  # half^{2k+1}/(k!(k+1)!) at k = 0
    k = 0
    while True:
        contrib = (-1) ** k * (psi1 + psi2) * coeff
        series += contrib
        if abs(contrib) <= 1e-18 * max(abs(series), 1e-300):
            break
        k += 1
        psi1 += 1.0 / k
        psi2 += 1.0 / (k + 1)
        coeff *= half * half / (k * (k + 1))
    y1_ref = (2.0 / math.pi) * math.log(half) * j1_ref - 2.0 / (math.pi * eps0) - series / math.pi

    return j1_trunc, y1_trunc, j1_ref, y1_ref


def kernel_moment_closed(q: MomentQuery) -> complex:
    """Closed form of the kernel moment via the terminating Kummer polynomial."""
    gam = gamma_half_integer(2 * q.n)
    return SQRT_I * np.exp(-1j * q.eps0) * gam * kummer_m(-q.n, 0.5 - 2 * q.n, 2j * q.eps0)


def _quad_complex(func, a, b, *, limit, points=None, epsabs=1e-13, epsrel=1e-12):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b, complex_func=True, epsabs=epsabs, epsrel=epsrel,
            limit=limit, points=points,
        )
    for w in caught:
        if issubclass(w.category, integrate.IntegrationWarning):
            raise QuadratureConvergenceError(
                f"adaptive quadrature on [{a}, {b}] exceeded its refinement budget: {w.message}"
            )
    # complex_func=True integrates the parts separately and reports both errors
    err = max(abs(complex(abserr).real), abs(complex(abserr).imag))
    err_scale = max(abs(value), 1e-30)
    if err > 1e-9 * err_scale and err > 1e-12:
        raise QuadratureConvergenceError(
            f"adaptive quadrature error estimate {err:.2e} too large for value {abs(value):.2e}"
        )
    return value


def _tail_cutoff(n, eps0):
    # Bound remainder (Y/eps0)^(2n) e^(-Y) below the 1e-14 relative target.
    y = 46.0
    for _ in range(64):
        need = 46.0 + 2.0 * n * math.log(max(y, 1.0) / eps0) if n else 46.0
        if y >= need:
            break
        y = need
    return y


def kernel_moment_contour(q: MomentQuery) -> complex:
    """Kernel moment by two-piece contour quadrature.

    Real leg u in (0, 1] with the endpoint singularity removed by u = s^2;
    rotated leg u = 1 + i w rescaled to y = w eps0 so the weight is e^(-y),
    truncated where the remainder falls below 1e-14 of the result.
    """
    n, eps0 = q.n, q.eps0

    def f_real(s):
        u = s * s
        return 2.0 * (u * (2.0 - u)) ** n * np.exp(1j * eps0 * (u - 1.0))

    real_leg = _quad_complex(f_real, 0.0, 1.0, limit=300)

    cutoff = _tail_cutoff(n, eps0)

    def f_tail(y):
        w = y / eps0
        return 1j * (1.0 + w * w) ** n * (1.0 + 1j * w) ** (-0.5) * np.exp(-y) / eps0

    # The (1 + i w)^(-1/2) factor turns over on the scale y ~ eps0.
    pts = [p for p in (eps0, 10.0 * eps0) if 0.0 < p < cutoff] or None
    tail = _quad_complex(f_tail, 0.0, cutoff, limit=800, points=pts)

    return eps0 ** (2 * n + 0.5) * (real_leg + tail)
