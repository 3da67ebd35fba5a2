"""Path functionals, the relativistic path weight, and short-time kernels.

Natural units throughout: hbar = c = 1, so a particle of mass m has Compton
time tau0 = 1/m and Compton length 1/m.  A sampled trajectory is a broken
line with piecewise-constant segment velocities; segments are allowed to be
superluminal, in which case every square root of 1 - v^2 follows the fixed
branch rule

    sqrt(1 - v^2) := -i sqrt(v^2 - 1)   for |v| >= 1.

The three functionals of a path are

    PBB  = sum_i m |v_i| / sqrt(1 - v_i^2) dt      (momentum integral)
    PCAL = sum_i sqrt(2 m^2 (1/sqrt(1-v_i^2) - 1)) dt   (kinetic integral)
    DTAU = sum_i sqrt(1 - v_i^2) dt                (proper time)

and the weight attached to the path is W = (PBB/PCAL) (DTAU/2)^(-1/2) with
principal-branch fractional powers.  For subluminal paths all three
functionals are real; superluminal segments make them complex, which is why
they are stored as complex numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import MomentQuery, _quad_complex, kernel_moment_closed

_UNIFORM_STEP_RTOL = 1e-12


class LightlikeSegmentError(ValueError):
    """A segment with |v| = 1 exactly; the momentum integrand diverges."""


class WeightUndefinedError(ValueError):
    """Path weight requested for a rest path (kinetic functional zero)."""


class SeriesTruncationError(RuntimeError):
    """Moment series still contributing above tolerance at the order cap."""


@dataclass(frozen=True)
class PhysicalScale:
    """Mass scale in natural units; energies are multiples of m c^2."""

    mass: float

    def __post_init__(self):
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")

    @property
    def tau0(self):
        """Compton time 1/m."""
        return 1.0 / self.mass

    @property
    def lambda_c(self):
        """Compton length 1/m."""
        return 1.0 / self.mass


@dataclass(frozen=True)
class Path:
    """Time-ordered sampled trajectory on a uniform time grid."""

    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        if times.ndim != 1 or positions.ndim != 1 or times.size != positions.size:
            raise ValueError("times and positions must be 1-d sequences of equal length")
        if times.size < 2:
            raise ValueError("a path needs at least 2 samples")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise ValueError("times must be strictly increasing")
        dt = steps[0]
        if np.any(np.abs(steps - dt) > _UNIFORM_STEP_RTOL * abs(dt)):
            raise ValueError("time step must be uniform to 1e-12 relative")
        times = times.copy()
        positions = positions.copy()
        times.flags.writeable = False
        positions.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def velocities(self):
        """Piecewise-constant segment velocities (may exceed 1)."""
        return np.diff(self.positions) / self.dt

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])


@dataclass(frozen=True)
class PathFunctionals:
    """Momentum, kinetic, and proper-time functionals of one path.

    All three are real (pbb, pcal >= 0; 0 < dtau <= duration) whenever every
    segment is subluminal; superluminal segments rotate them into the complex
    plane through the branch rule.
    """

    pbb: complex
    pcal: complex
    dtau: complex


@dataclass(frozen=True)
class SampledField:
    """Field samples on a sorted spatial grid, evaluated by linear interpolation."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.size != values.size or x.size < 2:
            raise ValueError("field needs matching 1-d sample arrays with >= 2 points")
        if np.any(np.diff(x) <= 0):
            raise ValueError("field sample positions must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value, x_min, x_max):
        return cls(np.array([x_min, x_max]), np.array([float(value), float(value)]))

    def __call__(self, xq):
        xq = np.asarray(xq, dtype=float)
        if np.any(xq < self.x[0]) or np.any(xq > self.x[-1]):
            raise ValueError("path exits the sampled field domain")
        return np.interp(xq, self.x, self.values)


def _sqrt_one_minus_v2(v2):
    """Branch rule: sqrt(1-v^2) for v^2 < 1, -i sqrt(v^2-1) for v^2 > 1."""
    v2 = np.asarray(v2, dtype=float)
    out = np.empty(v2.shape, dtype=complex)
    sub = v2 < 1.0
    out[sub] = np.sqrt(1.0 - v2[sub])
    out[~sub] = -1j * np.sqrt(v2[~sub] - 1.0)
    return out


def path_functionals(path: Path, scale: PhysicalScale) -> PathFunctionals:
    """Momentum, kinetic-energy, and proper-time functionals of a sampled path."""
    v = path.velocities
    v2 = v * v
    if np.any(v2 == 1.0):
        raise LightlikeSegmentError("lightlike segment: |v| = 1 makes the momentum integrand diverge")
    dt = path.dt
    root = _sqrt_one_minus_v2(v2)
    m = scale.mass
    pbb = np.sum(m * np.abs(v) / root) * dt
    pcal = np.sum(np.sqrt(2.0 * m * m * (1.0 / root - 1.0) + 0j)) * dt
    dtau = np.sum(root) * dt
    return PathFunctionals(pbb=complex(pbb), pcal=complex(pcal), dtau=complex(dtau))


def path_weight(pf: PathFunctionals) -> complex:
    """W = (PBB/PCAL) (DTAU/2)^(-1/2), principal branches."""
    if pf.pcal == 0:
        raise WeightUndefinedError(
            "path weight undefined for a rest path; use the nonrelativistic limit"
        )
    return (pf.pbb / pf.pcal) * (0.5 * pf.dtau) ** -0.5


def path_action(path: Path, scale: PhysicalScale, a_field=None, v_field=None) -> complex:
    """Relativistic action sum_i [-m sqrt(1-v_i^2) + A(x_mid) v_i - V(x_mid)] dt.

    a_field / v_field are SampledField instances (or None for zero field);
    both are evaluated at segment midpoints.
    """
    v = path.velocities
    v2 = v * v
    dt = path.dt
    x_mid = 0.5 * (path.positions[:-1] + path.positions[1:])
    lagr = -scale.mass * _sqrt_one_minus_v2(v2)
    if a_field is not None:
        lagr = lagr + a_field(x_mid) * v
    if v_field is not None:
        lagr = lagr - v_field(x_mid)
    return complex(np.sum(lagr) * dt)


def short_time_closed_form(p_momentum, eps0, scale: PhysicalScale) -> complex:
    """Closed-form short-time plane-wave amplitude (scalar part, before the
    whole-weight operator):

        (i tau0 pi)^(1/2) [(1 - i tau0 p)^(-1/2) + (1 + i tau0 p)^(-1/2)] e^{-i E_p eps}

    with E_p = sqrt(m^2 + p^2) and eps = eps0 tau0.
    """
    tau0 = scale.tau0
    ptau = p_momentum * tau0
    ep_eps = math.sqrt(1.0 + ptau * ptau) * eps0  # E_p * eps in natural units
    bracket = (1.0 - 1j * ptau) ** -0.5 + (1.0 + 1j * ptau) ** -0.5
    return (1j * tau0 * math.pi) ** 0.5 * bracket * np.exp(-1j * ep_eps)


def short_time_plane_wave(p_momentum, eps0, scale: PhysicalScale) -> complex:
    """Short-time amplitude for phi = e^{ipx} by direct contour quadrature.

    Evaluates the subluminal and superluminal velocity integrals on the same
    two-piece contour as the kernel moments, with the plane wave symmetrized
    into cos(p v eps).  Valid for any p, in particular beyond |p| = m where
    the term-by-term moment series stops converging.
    """
    if not (eps0 > 0.0 and math.isfinite(eps0)):
        raise ValueError(f"eps0 must be positive and finite, got {eps0!r}")
    tau0 = scale.tau0
    q = p_momentum * tau0 * eps0  # phase p*v*eps at v = 1

    def f_real(s):
        u = s * s
        v = np.sqrt(u * (2.0 - u))
        return 2.0 * np.exp(1j * eps0 * (u - 1.0)) * np.cos(q * v)

    real_leg = _quad_complex(f_real, 0.0, 1.0, limit=400)

    def f_tail(y):
        w = y / eps0
        v = np.sqrt(1.0 + w * w)
        return 1j * (1.0 + 1j * w) ** (-0.5) * np.exp(-y) * np.cos(q * v) / eps0

    pts = [pt for pt in (eps0, 10.0 * eps0) if 0.0 < pt < 46.0] or None
    tail = _quad_complex(f_tail, 0.0, 46.0, limit=800, points=pts)

    return 2.0 * math.sqrt(tau0) * math.sqrt(eps0) * (real_leg + tail)


def short_time_plane_wave_series(p_momentum, eps0, scale: PhysicalScale, *, n_max=12,
                                 rel_tol=1e-10) -> complex:
    """Short-time amplitude summed term by term over the closed kernel moments.

    The Taylor route in p: amplitude = 2 sqrt(tau0) sum_n (-1)^n (p tau0)^{2n}
    / (2n)! M_n(eps0).  Its radius of convergence is |p| = m (the branch
    points of the closed form), so it serves as a cross-check at small p;
    a SeriesTruncationError is raised when the n = n_max term still
    contributes more than rel_tol relatively.
    """
    tau0 = scale.tau0
    ptau = p_momentum * tau0
    total = 0.0 + 0.0j
    coeff = 1.0  # (-1)^n (p tau0)^(2n) / (2n)!
    last_rel = np.inf
    for n in range(n_max + 1):
        term = coeff * kernel_moment_closed(MomentQuery(n=n, eps0=eps0))
        total += term
        last_rel = abs(term) / max(abs(total), 1e-300)
        coeff *= -ptau * ptau / ((2 * n + 1) * (2 * n + 2))
    if last_rel > rel_tol:
        raise SeriesTruncationError(
            f"moment series still contributing {last_rel:.2e} relatively at n={n_max}; "
            f"|p| tau0 = {abs(ptau):.3g} is too large for the Taylor route"
        )
    return 2.0 * math.sqrt(tau0) * total


def equal_time_kernel_profile(eta, a_line_integral, scale: PhysicalScale) -> complex:
    """Scalar profile of the equal-time kernel, whole-weight operator excluded:

        sqrt(1/(i|eta|)) exp(-(m |eta| + i * integral of A along the gap)).

    Unlike a delta function this decays on the Compton length 1/m, which is
    the nonlocal equal-time correlation the collapse machinery relies on.
    """
    if eta == 0:
        raise ValueError("eta = 0 is the distributional point; profile defined for eta != 0")
    aeta = abs(eta)
    return (1j * aeta) ** -0.5 * np.exp(-scale.mass * aeta - 1j * a_line_integral)


def straight_path(v, duration, n_segments=1, t0=0.0, x0=0.0) -> Path:
    """Constant-velocity path sampled with n_segments equal segments."""
    times = t0 + np.linspace(0.0, duration, n_segments + 1)
    return Path(times=times, positions=x0 + v * (times - t0))
