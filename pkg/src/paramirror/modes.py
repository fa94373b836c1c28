"""Angular mode functions, boundary quantisation, and vector mode fields.

Continuous modes are labelled by an azimuthal number ``ell`` and a real
``mu``; their polar part is a pure phase in ``t = ln tan(theta/2)``. Placing
the mirror at ``eta = f`` discretises ``mu`` to ``m * pi / ln(2 k f)`` and
confines the polar functions to ``[theta0, pi - theta0]``, which is exactly
``t in [-L, L]`` with ``L = ln(2 k f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CartesianPoint
from .quadrature import (
    QuadratureSpec,
    azimuthal_trapezoid,
    integrate_interval,
    oscillation_panels,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class MirrorSpec:
    """Focal length ``f`` and wavenumber ``k`` in mutually consistent units."""

    f: float
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.f) and self.f > 0):
            raise ValueError(f"focal length must be positive, got {self.f}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"wavenumber must be positive, got {self.k}")

    @classmethod
    def from_wavelength(cls, f: float, wavelength: float) -> "MirrorSpec":
        return cls(f, 2.0 * math.pi / wavelength)

    @property
    def kf(self) -> float:
        return self.k * self.f

    @property
    def log_2kf(self) -> float:
        """``L = ln(2 k f)``; positive only when ``kf > 1/2``."""
        return math.log(2.0 * self.kf)

    @property
    def theta0(self) -> float:
        return theta_cutoff(self)


@dataclass(frozen=True)
class ContinuousModeIndex:
    ell: int
    mu: float

    def __post_init__(self):
        if int(self.ell) != self.ell:
            raise ValueError(f"ell must be an integer, got {self.ell}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")


@dataclass(frozen=True)
class DiscreteModeIndex:
    ell: int
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")


@dataclass(frozen=True)
class ModeFieldSample:
    """Electric mode field at one position (``value`` shape (3,)) or many ((n, 3))."""

    value: np.ndarray
    position: CartesianPoint | np.ndarray
    quadrature_error: float
    converged: bool = True


def log_tan_half(theta):
    """``ln tan(theta/2)`` via the half-angle identities, exactly 0 at pi/2."""
    theta = np.asarray(theta, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    with np.errstate(divide="ignore"):
        return np.where(c >= 0, np.log(s) - np.log(1.0 + c), np.log(1.0 - c) - np.log(s))


def theta_from_log_tan(t):
    return 2.0 * np.arctan(np.exp(np.asarray(t, dtype=float)))


def _require_open_polar(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0) | (theta >= math.pi)):
        raise ValueError("theta must lie strictly inside (0, pi); the mode functions are singular at the poles")
    return theta


def chi_continuous(mu: float, theta):
    """``exp(-i mu ln tan(theta/2)) / (sqrt(2 pi) sin theta)``."""
    theta = _require_open_polar(theta)
    out = np.exp(-1j * mu * log_tan_half(theta)) / (SQRT_2PI * np.sin(theta))
    return out if out.ndim else complex(out)


def h_mode(idx: ContinuousModeIndex, theta, phi):
    out = chi_continuous(idx.mu, theta) * np.exp(1j * idx.ell * np.asarray(phi)) / SQRT_2PI
    return out if np.ndim(out) else complex(out)


def theta_cutoff(spec: MirrorSpec) -> float:
    """Cutoff polar angle with ``tan(theta0/2) = 1/(2 k f)``."""
    return 2.0 * math.atan(1.0 / (2.0 * spec.kf))


def _require_quantisable(spec: MirrorSpec) -> float:
    if spec.kf <= 0.5:
        raise ValueError(f"discrete modes need kf > 1/2 so that ln(2kf) > 0, got kf={spec.kf}")
    return spec.log_2kf


def mu_quantized(m: int, spec: MirrorSpec) -> float:
    L = _require_quantisable(spec)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return m * math.pi / L


def discrete_normalization(spec: MirrorSpec) -> float:
    # 1/sqrt(L) makes the Gram matrix the identity; the 1/sqrt(2 pi L) variant does not.
    return 1.0 / math.sqrt(_require_quantisable(spec))


def chi_discrete(idx: DiscreteModeIndex | int, theta, spec: MirrorSpec):
    """Boundary-quantised polar function, zero outside ``(theta0, pi - theta0)``.

    The window endpoints are nodes of every mode and return exactly 0.
    """
    m = idx.m if isinstance(idx, DiscreteModeIndex) else int(idx)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    L = _require_quantisable(spec)
    theta = np.asarray(theta, dtype=float)
    th0 = theta_cutoff(spec)
    inside = (theta > th0) & (theta < math.pi - th0)
    safe = np.where(inside, theta, 0.5 * math.pi)
    val = discrete_normalization(spec) * np.sin(m * math.pi * log_tan_half(safe) / L) / np.sin(safe)
    out = np.where(inside, val, 0.0)
    return out if out.ndim else float(out)


def gram_matrix(spec: MirrorSpec, m_max: int, quad: QuadratureSpec | None = None) -> np.ndarray:
    """``G[m-1, m'-1] = int sin(theta) chi_m chi_m' dtheta`` over the cutoff window.

    Integrated directly in theta. Breakpoints are placed where ``t`` is
    uniform so that the log-compressed oscillations near the window edges are
    resolved from the start.
    """
    quad = quad or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)
    L = _require_quantisable(spec)
    th0 = theta_cutoff(spec)
    ms = np.arange(1, m_max + 1)
    per_side = oscillation_panels(m_max * math.pi, per_period=8)
    breaks = theta_from_log_tan(np.linspace(-L, L, 2 * per_side + 1))

    def integrand(theta):
        chis = np.stack([chi_discrete(int(m), theta, spec) for m in ms], axis=-1)
        weighted = np.sin(theta)[:, None, None] * chis[:, :, None] * chis[:, None, :]
        return weighted

    res = integrate_interval(integrand, th0, math.pi - th0, quad, breakpoints=breaks)
    return np.asarray(res.value)


def asymptotic_F(idx: ContinuousModeIndex, k: float, eta: float, alpha: float | None = None,
                 f: float | None = None) -> float:
    """Large-``eta`` form of the parabolic radial function along ``eta``.

    ``alpha`` defaults to ``k * f`` (requires ``f``), the phase that puts an
    extremum of the radial function on the mirror for quantised ``mu``.
    """
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if alpha is None:
        if f is None:
            raise ValueError("give either alpha or the focal length f")
        alpha = k * f
    return math.cos(idx.mu * math.log(2.0 * k * eta) + k * eta - alpha) / math.sqrt(eta)


def _tail_cut(rel_tol: float) -> float:
    # Polar weight in t is sech(t) <= 2 exp(-|t|); cut where the tails are ~1e-2 rel_tol.
    return math.log(4.0 / (1e-2 * rel_tol))


def evaluate_mode_field(sigma: int, k: float, idx: ContinuousModeIndex, r,
                        quad: QuadratureSpec | None = None,
                        theta_window: tuple[float, float] | None = None) -> ModeFieldSample:
    """Vector mode field ``E^sigma_{k, ell, mu}(r)`` as a plane-wave superposition.

    The polar integral is carried out in ``t = ln tan(theta/2)``, where the
    measure ``sin(theta) dtheta`` times the ``1/sin(theta)`` of the mode
    function becomes ``sech(t) dt`` and the mu-dependence is a plain
    ``exp(-i mu t)``. Without a window the infinite t-range is truncated where
    the sech tail drops below the tolerance; the tail bound is added to the
    error estimate.

    ``r`` may be a :class:`CartesianPoint`, a length-3 array, or an ``(n, 3)``
    array of positions; all positions share one quadrature mesh, which keeps
    finite differences between them free of mesh noise.
    """
    if sigma not in (1, 2):
        raise ValueError(f"sigma must be 1 or 2, got {sigma}")
    quad = quad or QuadratureSpec()
    pos = r.as_array() if isinstance(r, CartesianPoint) else np.asarray(r, dtype=float)
    single = pos.ndim == 1
    pts = pos.reshape(-1, 3)

    if theta_window is None:
        t_cut = _tail_cut(quad.rel_tol)
        t_lo, t_hi = -t_cut, t_cut
        tail = 4.0 * math.exp(-t_cut)
    else:
        lo, hi = theta_window
        if not (0.0 < lo < hi < math.pi):
            raise ValueError(f"theta window must lie inside (0, pi), got {theta_window}")
        t_lo, t_hi = float(log_tan_half(lo)), float(log_tan_half(hi))
        tail = 0.0
    prefactor = k / (2.0 * math.pi) ** 1.5
    mu, ell = idx.mu, idx.ell

    def integrand(t, phi):
        # t: (m, 1), phi: (1, n) -> (m, n, P, 3)
        sech = 1.0 / np.cosh(t)
        cos_t = -np.tanh(t)
        cp, sp = np.cos(phi), np.sin(phi)
        nx, ny = sech * cp, sech * sp
        phase = k * (nx[..., None] * pts[:, 0] + ny[..., None] * pts[:, 1]
                     + cos_t[..., None] * pts[:, 2])
        if sigma == 1:
            pol = np.stack(np.broadcast_arrays(sp, -cp, np.zeros_like(t * phi)), axis=-1)
        else:
            pol = np.stack(np.broadcast_arrays(cos_t * cp, cos_t * sp, -sech + 0 * phi), axis=-1)
        weight = sech * np.exp(-1j * mu * t + 1j * ell * phi) / (2.0 * math.pi)
        return (weight[..., None] * np.exp(1j * phase))[..., None] * pol[..., None, :]

    inner = azimuthal_trapezoid(integrand, quad)
    panels = max(4, oscillation_panels(abs(mu) * (t_hi - t_lo)))
    res = integrate_interval(inner, t_lo, t_hi, quad, min_panels=panels)
    value = prefactor * np.asarray(res.value)
    err = prefactor * (res.error_estimate + 2.0 * math.pi * tail)
    if single:
        value = value[0]
        position = r if isinstance(r, CartesianPoint) else CartesianPoint.from_array(pos)
    else:
        value = value.reshape(pos.shape[:-1] + (3,))
        position = pos
    return ModeFieldSample(value, position, err, res.converged and inner.converged)
