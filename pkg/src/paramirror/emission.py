"""Spontaneous emission of a z-polarised dipole in front of a parabolic mirror.

All rates are expressed as ``eta = Gamma_mirror / Gamma_free``. The mirror
turns each travelling plane wave into a standing wave with a node at the
vertex ``(0, 0, -f)``, so the per-direction weight of the free-space dipole
pattern ``sin^2(theta)`` is multiplied by ``2 sin^2(k n.(r - r_vertex))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants
from scipy.special import spherical_jn

from .geometry import CartesianPoint, Direction, parabolic_eta
from .modes import MirrorSpec, theta_cutoff
from .quadrature import IntegralResult, QuadratureSpec, integrate_sphere, oscillation_panels

FREE_SPACE_COEFFICIENT = 1.0 / (3.0 * math.pi)
# Full-sphere integral of sin^3(theta) is 8 pi / 3; this makes the free-space weight integrate to 1.
DENSITY_PREFACTOR = 3.0 / (8.0 * math.pi)
# Below this the closed form loses digits to cancellation; the power series takes over.
SERIES_THRESHOLD = 0.5


@dataclass(frozen=True)
class AtomPosition:
    """Emitter location relative to the focus; the dipole points along z."""

    point: CartesianPoint

    @classmethod
    def at(cls, x: float, y: float, z: float) -> "AtomPosition":
        return cls(CartesianPoint(x, y, z))

    @classmethod
    def on_axis(cls, z: float) -> "AtomPosition":
        return cls(CartesianPoint(0.0, 0.0, z))

    def inside(self, spec: MirrorSpec, rel_tol: float = 1e-12) -> bool:
        """Closed mirror region ``eta <= f``; the vertex itself is admitted."""
        p = self.point
        return float(parabolic_eta(p.x, p.y, p.z)) <= spec.f * (1.0 + rel_tol)

    def relative_to_vertex(self, spec: MirrorSpec) -> np.ndarray:
        p = self.point
        return np.array([p.x, p.y, p.z + spec.f])


@dataclass(frozen=True)
class EmissionResult:
    eta: float
    quad_error: float
    gamma0_si: float | None = None
    converged: bool = True


@dataclass(frozen=True)
class ScanRow:
    z: float
    a: float
    eta_closed: float
    eta_quadrature: float | None = None
    quad_error: float | None = None
    converged: bool = True


@dataclass
class ScanResult:
    spec: MirrorSpec
    rows: list[ScanRow] = field(default_factory=list)

    @property
    def z(self) -> np.ndarray:
        return np.array([r.z for r in self.rows])

    @property
    def eta_closed(self) -> np.ndarray:
        return np.array([r.eta_closed for r in self.rows])


def dipole_bundle(dipole_cm: float) -> float:
    """``d^2 / (hbar eps0)`` in SI units for a dipole moment given in C m."""
    return dipole_cm ** 2 / (constants.hbar * constants.epsilon_0)


def gamma_free(k: float, dipole_sq_over_hbar_eps0: float | None = None) -> float:
    """Free-space decay rate ``d^2 k^3 / (3 pi hbar eps0)``.

    Without the SI bundle only the dimensionless coefficient ``1/(3 pi)`` is
    returned. With it, ``k`` must be in inverse metres and the result is in
    inverse seconds.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if dipole_sq_over_hbar_eps0 is None:
        return FREE_SPACE_COEFFICIENT
    return FREE_SPACE_COEFFICIENT * dipole_sq_over_hbar_eps0 * k ** 3


def free_space_quadrature(quad: QuadratureSpec | None = None) -> IntegralResult:
    """Free-space rate coefficient from the mode sum with unit plane-wave modulus.

    ``(1/(2 pi)^2) (1/2) int dphi int dtheta sin^3(theta)``, which should
    reproduce ``1/(3 pi)``.
    """
    quad = quad or QuadratureSpec(rel_tol=1e-13)
    res = integrate_sphere(lambda th, ph: np.sin(th) ** 3 + 0.0 * ph, (0.0, math.pi), quad)
    scale = 0.5 / (2.0 * math.pi) ** 2
    return IntegralResult(scale * res.value, scale * res.error_estimate, res.converged, res.evaluations)


def _series_eta(a):
    # eta = 1 - 3 j1(x)/x with x = 2a, expanded in x^2; the n = 0 term cancels the 1.
    x2 = (2.0 * a) ** 2
    total = np.zeros_like(a)
    term = np.ones_like(a) / 3.0
    for n in range(1, 16):
        term = -term * x2 / (2.0 * n * (2.0 * n + 3.0))
        total = total + term
    return -3.0 * total + 0.0


def eta_on_axis(a):
    """Rate ratio for an emitter on the mirror axis at ``a = k (z + f)``.

    ``1 + 3 cos(2a)/(4a^2) - 3 sin(2a)/(8a^3)``; small ``a`` is evaluated from
    the power series ``(2/5) a^2 - (2/35) a^4 + ...`` to avoid cancellation.
    Accepts scalars or arrays.
    """
    arr = np.asarray(a, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("a = k (z + f) must be finite and non-negative (emitter behind the vertex)")
    small = arr < SERIES_THRESHOLD
    safe = np.where(small, 1.0, arr)
    closed = 1.0 + 3.0 * np.cos(2 * safe) / (4 * safe ** 2) - 3.0 * np.sin(2 * safe) / (8 * safe ** 3)
    out = np.where(small, _series_eta(np.where(small, arr, 0.0)), closed)
    return float(out) if out.ndim == 0 else out


def eta_bessel(spec: MirrorSpec, pos: AtomPosition) -> float:
    """Closed form valid at any position: ``1 - j0(x) - P2(cos psi) j2(x)``.

    ``x = 2 k |r - r_vertex|`` and ``psi`` is the angle between ``r - r_vertex``
    and the mirror axis. Follows from the plane-wave expansion of the
    standing-wave factor; on the axis it reduces to :func:`eta_on_axis`.
    """
    rel = pos.relative_to_vertex(spec)
    dist = float(np.linalg.norm(rel))
    if dist == 0:
        return 0.0
    x = 2.0 * spec.k * dist
    cos_psi = rel[2] / dist
    p2 = 0.5 * (3.0 * cos_psi ** 2 - 1.0)
    return float(1.0 - spherical_jn(0, x) - p2 * spherical_jn(2, x))


def _standing_wave_phase(spec, pos, theta, phi):
    rel = pos.relative_to_vertex(spec)
    return spec.k * ((rel[0] * np.cos(phi) + rel[1] * np.sin(phi)) * np.sin(theta)
                     + rel[2] * np.cos(theta))


def angular_density_array(spec: MirrorSpec, pos: AtomPosition, theta, phi,
                          standing_wave: bool = True):
    """Emission weight per unit solid angle; its full-sphere integral is ``eta``."""
    theta = np.asarray(theta, dtype=float)
    base = DENSITY_PREFACTOR * np.sin(theta) ** 2
    if not standing_wave:
        return base + 0.0 * np.asarray(phi)
    return base * 2.0 * np.sin(_standing_wave_phase(spec, pos, theta, phi)) ** 2


def angular_density(spec: MirrorSpec, pos: AtomPosition, d: Direction) -> float:
    return float(angular_density_array(spec, pos, d.theta, d.phi))


def eta_quadrature(spec: MirrorSpec, pos: AtomPosition, quad: QuadratureSpec | None = None,
                   theta_window: tuple[float, float] | None = None, standing_wave: bool = True,
                   dipole_sq_over_hbar_eps0: float | None = None,
                   length_unit_m: float = 1.0) -> EmissionResult:
    """Rate ratio by direct integration of the angular density over the sphere.

    Parameters
    ----------
    spec, pos
        Mirror and emitter; the emitter must lie in the closed mirror region.
    quad : QuadratureSpec, optional
    theta_window : (float, float), optional
        Restrict the polar integral, e.g. to ``(theta0, pi - theta0)``.
    standing_wave : bool
        Replace the standing-wave factor by its mean when False (free space).
    dipole_sq_over_hbar_eps0, length_unit_m
        When the SI bundle is given, ``gamma0_si`` is filled in using
        ``k / length_unit_m`` as the wavenumber in inverse metres.
    """
    if not pos.inside(spec):
        raise ValueError(f"emitter {pos.point} lies outside the mirror (eta > f)")
    quad = quad or QuadratureSpec()
    lo, hi = theta_window if theta_window is not None else (0.0, math.pi)
    a_r = spec.k * float(np.linalg.norm(pos.relative_to_vertex(spec)))
    panels = oscillation_panels(a_r * (hi - lo), period=math.pi) if standing_wave else 1

    res = integrate_sphere(
        lambda th, ph: np.sin(th) * angular_density_array(spec, pos, th, ph, standing_wave),
        (lo, hi), quad, min_panels=panels,
    )
    gamma0 = None
    if dipole_sq_over_hbar_eps0 is not None:
        gamma0 = gamma_free(spec.k / length_unit_m, dipole_sq_over_hbar_eps0)
    return EmissionResult(float(res.value), res.error_estimate, gamma0, res.converged)


def cutoff_correction(spec: MirrorSpec) -> float:
    """Fraction of the free-space rate carried by the two polar caps of half-angle theta0.

    ``(3/2) int_0^theta0 sin^3 = (3/2) u^2 (1 - u/3)`` with
    ``u = 1 - cos(theta0) = 2 s^2 / (1 + s^2)`` and ``s = 1/(2kf)``;
    written this way it keeps full precision when theta0 is tiny.
    """
    s = 1.0 / (2.0 * spec.kf)
    u = 2.0 * s * s / (1.0 + s * s)
    return 1.5 * u * u * (1.0 - u / 3.0)


def decay_scan(spec: MirrorSpec, z_min: float, z_max: float, n_points: int,
               with_quadrature: bool = False, quad: QuadratureSpec | None = None) -> ScanResult:
    """Tabulate the on-axis rate ratio on a uniform grid of z (relative to the focus)."""
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    if not z_min < z_max:
        raise ValueError(f"need z_min < z_max, got {z_min}, {z_max}")
    if z_min < -spec.f:
        raise ValueError(f"z_min={z_min} lies behind the mirror vertex at z={-spec.f}")
    z = np.linspace(z_min, z_max, n_points)
    a = np.maximum(spec.k * (z + spec.f), 0.0)
    closed = eta_on_axis(a)
    rows = []
    for zi, ai, ei in zip(z, a, closed):
        if with_quadrature:
            r = eta_quadrature(spec, AtomPosition.on_axis(float(zi)), quad)
            rows.append(ScanRow(float(zi), float(ai), float(ei), r.eta, r.quad_error, r.converged))
        else:
            rows.append(ScanRow(float(zi), float(ai), float(ei)))
    return ScanResult(spec, rows)
