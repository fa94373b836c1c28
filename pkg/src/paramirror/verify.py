"""Self-checks run by ``paramirror verify``.

Each check compares a library result with an independent reference (closed
form, analytic identity or finite differences) and reports pass/fail with the
observed discrepancy. The suite is sized to finish in well under a minute.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .emission import (
    AtomPosition,
    cutoff_correction,
    eta_on_axis,
    eta_quadrature,
    free_space_quadrature,
)
from .modes import ContinuousModeIndex, MirrorSpec, evaluate_mode_field, gram_matrix
from .quadrature import QuadratureSpec

ORACLE_AS = (0.1, 0.5, math.pi / 2, math.pi, 10.0, 100.0)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def check_free_space(quad: QuadratureSpec) -> Check:
    res = free_space_quadrature(QuadratureSpec(rel_tol=min(quad.rel_tol, 1e-13), abs_tol=0.0))
    rel = abs(res.value * 3.0 * math.pi - 1.0)
    return Check("free_space", rel <= 1e-12, f"rel. deviation from 1/(3 pi) = {rel:.2e}")


def check_oracle_equivalence(quad: QuadratureSpec, kfs=(10.0, 1e3)) -> Check:
    worst = 0.0
    ok = True
    for kf in kfs:
        spec = MirrorSpec(1.0, kf)
        for a in ORACLE_AS:
            res = eta_quadrature(spec, AtomPosition.on_axis(a / spec.k - spec.f), quad)
            diff = abs(res.eta - eta_on_axis(a))
            worst = max(worst, diff)
            ok &= res.converged and diff <= max(1e-8, 10 * res.quad_error)
    return Check("oracle_equivalence", ok, f"max |quadrature - closed form| = {worst:.2e}")


def check_vertex_node(quad: QuadratureSpec) -> Check:
    spec = MirrorSpec(1.0, 10.0)
    closed = eta_on_axis(0.0)
    numeric = eta_quadrature(spec, AtomPosition.on_axis(-spec.f), quad).eta
    return Check("vertex_node", closed == 0.0 and abs(numeric) <= 1e-10,
                 f"closed form {closed:.1e}, quadrature {numeric:.1e}")


def check_far_field(quad: QuadratureSpec) -> Check:
    ok = True
    worst = 0.0
    for a in (1e2, 1e3, 1e4):
        bound = 3 / (4 * a * a) + 3 / (8 * a ** 3)
        dev = abs(eta_on_axis(a) - 1.0)
        worst = max(worst, dev / bound)
        ok &= dev <= bound
    return Check("far_field", ok, f"max |eta - 1| / envelope = {worst:.3f}")


def check_gram(quad: QuadratureSpec, m_max: int = 10) -> Check:
    worst = 0.0
    for kf in (1.0, 10.0, 1e3):
        g = gram_matrix(MirrorSpec(1.0, kf), m_max,
                        QuadratureSpec(rel_tol=min(quad.rel_tol, 1e-12), abs_tol=1e-15))
        worst = max(worst, float(np.abs(g - np.eye(m_max)).max()))
    return Check("gram_orthonormality", worst <= 1e-8, f"max |G - I| = {worst:.2e}")


def cutoff_slope(kfs=None) -> float:
    kfs = np.geomspace(10.0, 1e3, 21) if kfs is None else np.asarray(kfs)
    deltas = [cutoff_correction(MirrorSpec(1.0, kf)) for kf in kfs]
    return float(np.polyfit(np.log(kfs), np.log(deltas), 1)[0])


def check_cutoff_scaling(quad: QuadratureSpec) -> Check:
    slope = cutoff_slope()
    return Check("cutoff_scaling", abs(slope + 4.0) <= 0.1, f"log-log slope = {slope:.4f}")


def divergence_ratio(sigma: int, ell: int, mu: float, points: np.ndarray, k: float = 1.0,
                     step: float = 1e-3, quad: QuadratureSpec | None = None) -> float:
    """``max |div E| / (k max |E|)`` from central differences at ``points``."""
    h = step / k
    offsets = np.concatenate([np.eye(3) * h, -np.eye(3) * h])
    stencil = (points[:, None, :] + offsets[None]).reshape(-1, 3)
    sample = evaluate_mode_field(sigma, k, ContinuousModeIndex(ell, mu),
                                 np.concatenate([points, stencil]), quad)
    n = len(points)
    centre = sample.value[:n]
    shifted = sample.value[n:].reshape(n, 6, 3)
    div = sum((shifted[:, i, i] - shifted[:, i + 3, i]) / (2 * h) for i in range(3))
    return float(np.abs(div).max() / (k * np.abs(centre).max()))


def random_ball(n: int, radius: float, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * (radius * rng.random(n) ** (1.0 / 3.0))[:, None]


def check_transversality(quad: QuadratureSpec, n_points: int = 20) -> Check:
    points = random_ball(n_points, 5.0, seed=1)
    worst = max(divergence_ratio(s, l, mu, points, quad=quad)
                for s, l, mu in ((2, 0, 0.0), (2, 1, 0.5), (1, 2, 1.0)))
    return Check("transversality", worst <= 1e-6, f"max |div E| / (k max|E|) = {worst:.2e}")


ALL_CHECKS = (
    check_free_space,
    check_oracle_equivalence,
    check_vertex_node,
    check_far_field,
    check_gram,
    check_cutoff_scaling,
    check_transversality,
)


def run_verification(quad: QuadratureSpec | None = None) -> list[Check]:
    quad = quad or QuadratureSpec()
    results = []
    for fn in ALL_CHECKS:
        t0 = time.perf_counter()
        try:
            chk = fn(quad)
        except Exception as exc:  # a crashing check is a failed check
            chk = Check(fn.__name__.removeprefix("check_"), False, f"raised {exc!r}")
        chk.seconds = time.perf_counter() - t0
        results.append(chk)
    return results


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  time    detail"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.seconds:5.2f}s  {c.detail}")
    return "\n".join(lines)
