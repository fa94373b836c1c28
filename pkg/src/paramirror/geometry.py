"""Cartesian and parabolic coordinates, the mirror surface, and direction frames.

The focus sits at the origin and the mirror is the paraboloid ``eta = f``,
i.e. ``z = (x**2 + y**2) / (4 f) - f`` with its vertex at ``(0, 0, -f)``.
Lengths carry whatever unit the caller uses for ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinates: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, v) -> "CartesianPoint":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)


@dataclass(frozen=True)
class ParabolicPoint:
    xi: float
    eta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (self.xi >= 0 and self.eta >= 0):
            raise ValueError(f"parabolic coordinates need xi, eta >= 0, got {self.xi}, {self.eta}")
        object.__setattr__(self, "phi", wrap_angle(self.phi))


@dataclass(frozen=True)
class Direction:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", min(max(float(self.theta), 0.0), math.pi))
        object.__setattr__(self, "phi", wrap_angle(self.phi))


@dataclass(frozen=True)
class PolarizationPair:
    e1: np.ndarray
    e2: np.ndarray


def wrap_angle(phi: float) -> float:
    wrapped = math.fmod(float(phi), TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    # fmod of a tiny negative can round up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def to_parabolic(p: CartesianPoint) -> ParabolicPoint:
    """Map a Cartesian point to ``(xi, eta, phi)``.

    Uses ``xi = (r + z)/2`` and ``eta = (r - z)/2``; whichever of the two
    suffers cancellation is recovered from ``xi * eta = rho**2 / 4`` instead.
    On the z-axis the azimuth is reported as 0.
    """
    rho2 = p.x * p.x + p.y * p.y
    r = math.sqrt(rho2 + p.z * p.z)
    if p.z >= 0:
        xi = 0.5 * (r + p.z)
        eta = rho2 / (4.0 * xi) if xi > 0 else 0.0
    else:
        eta = 0.5 * (r - p.z)
        xi = rho2 / (4.0 * eta)
    phi = math.atan2(p.y, p.x) if rho2 > 0 else 0.0
    return ParabolicPoint(xi, eta, phi)


def to_cartesian(p: ParabolicPoint) -> CartesianPoint:
    rho = 2.0 * math.sqrt(p.xi * p.eta)
    return CartesianPoint(rho * math.cos(p.phi), rho * math.sin(p.phi), p.xi - p.eta)


def parabolic_eta(x, y, z):
    """Vectorised ``eta = (r - z)/2`` with the same cancellation guard as :func:`to_parabolic`."""
    x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
    rho2 = x * x + y * y
    r = np.sqrt(rho2 + z * z)
    with np.errstate(divide="ignore", invalid="ignore"):
        via_xi = np.where(r + z > 0, rho2 / (r + z), 0.0)
    return np.where(z < 0, 0.5 * (r - z), 0.5 * via_xi)


def on_mirror(p: CartesianPoint, spec, tol: float) -> bool:
    """True when ``p`` lies within ``tol`` (in eta) of the mirror surface ``eta = f``.

    ``spec`` is a :class:`~paramirror.modes.MirrorSpec` or a bare focal length.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f = getattr(spec, "f", spec)
    return abs(to_parabolic(p).eta - f) <= tol


def mirror_surface_z(x, y, f: float):
    """Height of the mirror surface above the transverse point ``(x, y)``."""
    return (np.asarray(x) ** 2 + np.asarray(y) ** 2) / (4.0 * f) - f


def direction_vector(d: Direction) -> np.ndarray:
    st = math.sin(d.theta)
    return np.array([st * math.cos(d.phi), st * math.sin(d.phi), math.cos(d.theta)])


def polarization_basis(d: Direction) -> PolarizationPair:
    """Transverse polarisation vectors for propagation direction ``d``.

    ``e1`` is horizontal (no z-component); ``e2 = n x e1`` lies in the
    meridional plane, so ``(n, e1, e2)`` is a right-handed triad.
    """
    ct, st = math.cos(d.theta), math.sin(d.theta)
    cp, sp = math.cos(d.phi), math.sin(d.phi)
    e1 = np.array([sp, -cp, 0.0])
    e2 = np.array([ct * cp, ct * sp, -st])
    return PolarizationPair(e1, e2)


def frame_arrays(theta, phi):
    """Broadcast versions of ``n``, ``e1``, ``e2``; each has a trailing axis of length 3."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    n = np.stack([st * cp, st * sp, ct], axis=-1)
    e1 = np.stack([sp, -cp, np.zeros_like(theta)], axis=-1)
    e2 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    return n, e1, e2
