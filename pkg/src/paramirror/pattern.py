"""Interference pattern on a screen behind the collimating paraboloid.

A ray leaving the focus toward the mirror at angle ``theta`` from the
backward axis (the direction of the vertex) is reflected parallel to the axis
at transverse radius ``rho = 2 f tan(theta/2)``, keeping its azimuth. The
screen pattern is the emission angular density carried along these rays; the
emission polar angle measured from +z is ``pi - theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .emission import AtomPosition, angular_density_array
from .modes import MirrorSpec, theta_cutoff


@dataclass(frozen=True)
class ScreenGrid:
    radius_max: float
    n_radial: int = 201
    n_azimuthal: int = 64
    aperture_radius: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.radius_max) and self.radius_max > 0):
            raise ValueError(f"radius_max must be positive, got {self.radius_max}")
        if self.n_radial < 2 or self.n_azimuthal < 4:
            raise ValueError("need n_radial >= 2 and n_azimuthal >= 4")
        if self.aperture_radius is not None and self.radius_max > self.aperture_radius:
            raise ValueError(f"radius_max {self.radius_max} exceeds the mirror aperture {self.aperture_radius}")

    @property
    def rho(self) -> np.ndarray:
        return np.linspace(0.0, self.radius_max, self.n_radial)

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_azimuthal) / self.n_azimuthal


@dataclass
class PatternResult:
    rho: np.ndarray
    phi: np.ndarray
    intensity: np.ndarray  # shape (n_radial, n_azimuthal)
    dark_ring_radii: list[float] = field(default_factory=list)
    per_solid_angle: bool = False

    def rows(self):
        """``(rho, phi, intensity)`` triples in radial-major order."""
        for i, r in enumerate(self.rho):
            for j, p in enumerate(self.phi):
                yield float(r), float(p), float(self.intensity[i, j])

    def azimuthal_asymmetry(self) -> float:
        """Largest spread of intensity over azimuth at fixed radius."""
        return float(np.max(self.intensity.max(axis=1) - self.intensity.min(axis=1)))


def screen_map(theta, spec: MirrorSpec):
    """Screen radius reached by the ray at angle ``theta`` from the backward axis."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta >= math.pi)):
        raise ValueError("theta must lie in [0, pi); the ray at pi never returns to the screen")
    out = 2.0 * spec.f * np.tan(0.5 * theta)
    return float(out) if out.ndim == 0 else out


def screen_angle(rho, spec: MirrorSpec):
    """Inverse of :func:`screen_map`."""
    return 2.0 * np.arctan(np.asarray(rho, dtype=float) / (2.0 * spec.f))


def solid_angle_per_area(rho, spec: MirrorSpec):
    """``dOmega/dA = 16 f^2 / (4 f^2 + rho^2)^2`` for the collimation map."""
    rho = np.asarray(rho, dtype=float)
    four_f2 = 4.0 * spec.f ** 2
    return 4.0 * four_f2 / (four_f2 + rho ** 2) ** 2


def screen_intensity(spec: MirrorSpec, pos: AtomPosition, rho, phi_s, per_solid_angle: bool = False):
    """Intensity at screen points; zero for rays outside the cutoff window."""
    rho, phi_s = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(phi_s, dtype=float))
    theta_s = screen_angle(rho, spec)
    th0 = theta_cutoff(spec)
    inside = (theta_s >= th0) & (theta_s <= math.pi - th0)
    density = angular_density_array(spec, pos, math.pi - theta_s, phi_s)
    if not per_solid_angle:
        density = density * solid_angle_per_area(rho, spec)
    return np.where(inside, density, 0.0)


def dark_ring_radii(spec: MirrorSpec, pos: AtomPosition, radius_max: float | None = None) -> list[float]:
    """Screen radii of the standing-wave nodes for an on-axis emitter.

    Nodes sit where ``k (z + f) cos(theta) = n pi``; only those strictly inside
    the cutoff window are reported. Off-axis emitters have no rings (empty list).
    """
    p = pos.point
    if p.x != 0.0 or p.y != 0.0:
        return []
    a = spec.k * (p.z + spec.f)
    if a <= 0:
        return []
    th0 = theta_cutoff(spec)
    n_max = int(math.floor(a / math.pi))
    radii = []
    for n in range(-n_max, n_max + 1):
        c = n * math.pi / a
        if abs(c) > 1.0:
            continue
        # emission angle arccos(c) arrives at screen angle pi - arccos(c) = arccos(-c)
        theta_s = math.acos(-c)
        if not (th0 < theta_s < math.pi - th0):
            continue
        rho = screen_map(theta_s, spec)
        if radius_max is None or rho <= radius_max:
            radii.append(rho)
    return sorted(radii)


def pattern_grid(spec: MirrorSpec, pos: AtomPosition, grid: ScreenGrid,
                 per_solid_angle: bool = False) -> PatternResult:
    rho, phi = grid.rho, grid.phi
    intensity = screen_intensity(spec, pos, rho[:, None], phi[None, :], per_solid_angle)
    rings = dark_ring_radii(spec, pos, grid.radius_max)
    return PatternResult(rho, phi, intensity, rings, per_solid_angle)


def screen_power(result: PatternResult) -> float:
    """Integral of a per-area pattern over the screen disk (trapezoid in rho, mean in phi)."""
    if result.per_solid_angle:
        raise ValueError("screen_power needs a per-area pattern")
    radial = result.intensity.mean(axis=1) * 2.0 * math.pi * result.rho
    return float(trapezoid(radial, result.rho))
