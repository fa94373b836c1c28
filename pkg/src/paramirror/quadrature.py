"""Adaptive integration over intervals and over the direction sphere.

The interval rule is a globally adaptive 7/15-point Gauss-Kronrod scheme with
QUADPACK-style error estimates. Work is vectorised per refinement round: every
panel that needs splitting in a round is bisected and evaluated in one call,
so the integrand must accept a 1-D array of abscissae. Integrands may return
extra trailing dimensions (vector fields, batches of points); the error
estimate is the largest over those components.

Sphere integrals use the trapezoidal rule in the azimuth, which is spectrally
accurate for periodic integrands, nested inside the interval rule in theta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "integrate_interval",
    "integrate_sphere",
    "azimuthal_trapezoid",
    "oscillation_panels",
]

# Kronrod abscissae/weights on [-1, 1] (QUADPACK qk15), ascending order.
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
])
_WK_CENTER = 0.209482141084727828012999174891714
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
])
_WG_CENTER = 0.417959183673469387755102040816327

_NODES = np.concatenate([-_XK_HALF, [0.0], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF, [_WK_CENTER], _WK_HALF[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes.
_WG = np.zeros(15)
_WG[[1, 3, 5]] = _WG_HALF
_WG[7] = _WG_CENTER
_WG[[13, 11, 9]] = _WG_HALF

_EPS = np.finfo(float).eps
_MAX_PHI_NODES = 1 << 16
# Upper bound on integrand samples per vectorised call (theta x phi x trailing).
_CHUNK = 1 << 20


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and work limits shared by the interval and sphere rules.

    ``max_subdivisions`` caps the number of panel bisections beyond the initial
    mesh; ``phi_nodes`` is the starting azimuthal node count, doubled until the
    trapezoidal sum settles.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    phi_nodes: int = 64

    def __post_init__(self):
        if not (np.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise ValueError(f"rel_tol must be positive and finite, got {self.rel_tol}")
        if not (np.isfinite(self.abs_tol) and self.abs_tol >= 0):
            raise ValueError(f"abs_tol must be non-negative and finite, got {self.abs_tol}")
        if self.max_subdivisions < 0:
            raise ValueError("max_subdivisions must be non-negative")
        if self.phi_nodes < 8 or self.phi_nodes % 2:
            raise ValueError(f"phi_nodes must be even and >= 8, got {self.phi_nodes}")

    def tolerance(self, magnitude: float) -> float:
        return max(self.abs_tol, self.rel_tol * magnitude)


@dataclass(frozen=True)
class IntegralResult:
    value: complex | float | np.ndarray
    error_estimate: float
    converged: bool
    evaluations: int


def oscillation_panels(phase_variation: float, per_period: int = 8,
                       period: float = 2 * np.pi) -> int:
    """Initial panel count giving ``per_period`` panels per oscillation.

    ``phase_variation`` is the total change of the oscillating phase across
    the integration range.
    """
    if not np.isfinite(phase_variation) or phase_variation <= 0:
        return 1
    return max(1, int(np.ceil(per_period * phase_variation / period)))


def _norm(values: np.ndarray) -> np.ndarray:
    """Largest component magnitude along all trailing axes."""
    mag = np.abs(values)
    if mag.ndim > 1:
        mag = mag.reshape(mag.shape[0], -1).max(axis=1)
    return mag


def _panel_error(fx, resk, resg, half):
    """QUADPACK qk15 error estimate, per panel and component, real parts separately."""
    parts = (fx.real, fx.imag) if np.iscomplexobj(fx) else (fx,)
    ks = (resk.real, resk.imag) if np.iscomplexobj(resk) else (resk,)
    gs = (resg.real, resg.imag) if np.iscomplexobj(resg) else (resg,)
    expand = (slice(None),) + (None,) * (fx.ndim - 2)
    w = _WK[(None, slice(None)) + (None,) * (fx.ndim - 2)]
    habs = np.abs(half)[expand]
    total = 0.0
    for f, k, g in zip(parts, ks, gs):
        mean = (k / (2 * half[expand]))[:, None]
        resasc = habs * np.sum(w * np.abs(f - mean), axis=1)
        resabs = habs * np.sum(w * np.abs(f), axis=1)
        err = np.abs(k - g)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc != 0) & (err != 0), scaled, err)
        err = np.maximum(err, 50 * _EPS * resabs)
        total = total + err
    return _norm(total) if np.ndim(total) > 1 else np.abs(total)


def _gk15(fn, lo, hi):
    """Apply the 15-point rule to every panel [lo_i, hi_i] in one integrand call."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(fn(x.ravel()))
    fx = fx.reshape((lo.size, 15) + fx.shape[1:])
    expand = (slice(None),) + (None,) * (fx.ndim - 2)
    w_shape = (None, slice(None)) + (None,) * (fx.ndim - 2)
    resk = half[expand] * np.sum(_WK[w_shape] * fx, axis=1)
    resg = half[expand] * np.sum(_WG[w_shape] * fx, axis=1)
    return resk, _panel_error(fx, resk, resg, half), lo.size * 15


def integrate_interval(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                       spec: QuadratureSpec | None = None, min_panels: int = 1,
                       breakpoints=None) -> IntegralResult:
    """Integrate ``fn`` over ``[a, b]`` adaptively.

    Parameters
    ----------
    fn : callable
        Vectorised integrand. Receives a 1-D array of abscissae and returns an
        array whose leading axis matches it; trailing axes are integrated
        component-wise.
    a, b : float
        Integration limits, ``a < b``.
    spec : QuadratureSpec, optional
        Tolerances and subdivision budget.
    min_panels : int
        Number of equal panels in the initial mesh. Use
        :func:`oscillation_panels` to size it for oscillatory integrands.
    breakpoints : sequence of float, optional
        Extra interior points added to the initial mesh.

    Returns
    -------
    IntegralResult
        ``converged`` is False when the subdivision budget ran out before the
        total error estimate fell below ``max(abs_tol, rel_tol * |value|)``.
    """
    spec = spec or QuadratureSpec()
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got a={a}, b={b}")

    edges = np.linspace(a, b, int(max(1, min_panels)) + 1)
    if breakpoints is not None:
        extra = np.asarray(breakpoints, dtype=float)
        extra = extra[(extra > a) & (extra < b)]
        edges = np.unique(np.concatenate([edges, extra]))
    lo, hi = edges[:-1], edges[1:]

    vals, errs, n_eval = _gk15(fn, lo, hi)
    splits = 0
    while True:
        total = vals.sum(axis=0)
        total_err = float(errs.sum())
        tol = spec.tolerance(float(np.max(np.abs(total))))
        if total_err <= tol:
            return IntegralResult(_unwrap(total), total_err, True, n_eval)

        width_ok = (hi - lo) > 4 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        # Any panel above its share of half the tolerance gets bisected; if all
        # panels were below that share the total would already be converged.
        refine = (errs > 0.5 * tol / lo.size) & width_ok
        n_refine = int(refine.sum())
        if n_refine == 0 or splits + n_refine > spec.max_subdivisions:
            return IntegralResult(_unwrap(total), total_err, False, n_eval)
        splits += n_refine

        mid = 0.5 * (lo[refine] + hi[refine])
        new_lo = np.concatenate([lo[refine], mid])
        new_hi = np.concatenate([mid, hi[refine]])
        new_vals, new_errs, n_new = _gk15(fn, new_lo, new_hi)
        n_eval += n_new

        keep = ~refine
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        order = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[order], hi[order], vals[order], errs[order]


def _unwrap(total):
    if np.ndim(total) == 0:
        return total.item()
    return total


class _AzimuthalSum:
    """Trapezoidal azimuthal integral of ``fn(theta, phi)`` for a batch of theta.

    Records whether every batch settled below tolerance and the number of
    integrand evaluations spent.
    """

    def __init__(self, fn, spec: QuadratureSpec):
        self.fn = fn
        self.spec = spec
        self.converged = True
        self.evaluations = 0
        self.max_nodes_used = 0

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        probe = self._batch(theta[:1], self.spec.phi_nodes)
        per_theta = max(1, probe[0][0, 0].size) * self.spec.phi_nodes
        step = max(1, _CHUNK // per_theta)
        parts = [self._integrate(theta[i:i + step]) for i in range(0, theta.size, step)]
        return np.concatenate(parts, axis=0)

    def _batch(self, theta, n_phi, offset=0.0):
        phi = offset + 2 * np.pi * np.arange(n_phi) / n_phi
        out = np.asarray(self.fn(theta[:, None], phi[None, :]))
        out = np.broadcast_to(out, (theta.size, n_phi) + out.shape[2:])
        return out, phi

    def _integrate(self, theta):
        n = self.spec.phi_nodes
        samples, _ = self._batch(theta, n)
        self.evaluations += theta.size * n
        total = samples.sum(axis=1)
        coarse = samples[:, ::2].sum(axis=1)
        while True:
            fine = 2 * np.pi * total / n
            half = 2 * np.pi * coarse / (n // 2)
            diff = float(np.max(np.abs(fine - half), initial=0.0))
            scale = float(np.max(np.abs(fine), initial=0.0))
            if diff <= 0.1 * self.spec.tolerance(scale):
                self.max_nodes_used = max(self.max_nodes_used, n)
                return fine
            if 2 * n > _MAX_PHI_NODES:
                self.converged = False
                self.max_nodes_used = max(self.max_nodes_used, n)
                return fine
            # Doubling: the new nodes sit halfway between the current ones.
            extra, _ = self._batch(theta, n, offset=np.pi / n)
            self.evaluations += theta.size * n
            coarse = total
            total = total + extra.sum(axis=1)
            n *= 2


def azimuthal_trapezoid(fn, spec: QuadratureSpec | None = None):
    """Wrap ``fn(theta, phi)`` into a callable ``g(theta) = int_0^{2pi} fn dphi``.

    The returned object exposes ``converged`` and ``evaluations`` after use.
    ``fn`` receives ``theta`` with shape (m, 1) and ``phi`` with shape (1, n)
    and must broadcast them, optionally appending trailing axes.
    """
    return _AzimuthalSum(fn, spec or QuadratureSpec())


def integrate_sphere(fn, theta_window=(0.0, np.pi), spec: QuadratureSpec | None = None,
                     min_panels: int = 1) -> IntegralResult:
    """Integrate ``fn(theta, phi)`` over ``phi in [0, 2pi)`` and a theta window.

    No ``sin(theta)`` weight is applied; the caller includes whatever measure
    its integrand needs.
    """
    spec = spec or QuadratureSpec()
    lo, hi = theta_window
    if not (0.0 <= lo < hi <= np.pi):
        raise ValueError(f"theta window must satisfy 0 <= lo < hi <= pi, got {theta_window}")
    inner = _AzimuthalSum(fn, spec)
    res = integrate_interval(inner, lo, hi, spec, min_panels=min_panels)
    return IntegralResult(res.value, res.error_estimate, res.converged and inner.converged,
                          inner.evaluations)
