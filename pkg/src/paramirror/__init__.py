"""Spontaneous emission of a dipole at the focus of a parabolic mirror.

The public API is spread over a handful of modules:

* :mod:`paramirror.geometry`   coordinates, mirror surface, polarisation frames
* :mod:`paramirror.quadrature` adaptive interval and sphere integration
* :mod:`paramirror.modes`      angular mode functions and vector mode fields
* :mod:`paramirror.emission`   decay-rate ratios and scans
* :mod:`paramirror.pattern`    screen interference patterns
"""

__version__ = "0.1.0"

from .emission import (  # noqa: E402
    AtomPosition,
    EmissionResult,
    ScanResult,
    angular_density,
    cutoff_correction,
    decay_scan,
    eta_bessel,
    eta_on_axis,
    eta_quadrature,
    gamma_free,
)
from .geometry import CartesianPoint, Direction, ParabolicPoint  # noqa: E402
from .modes import (  # noqa: E402
    ContinuousModeIndex,
    DiscreteModeIndex,
    MirrorSpec,
    chi_continuous,
    chi_discrete,
    evaluate_mode_field,
    mu_quantized,
    theta_cutoff,
)
from .pattern import PatternResult, ScreenGrid, pattern_grid, screen_map  # noqa: E402
from .quadrature import IntegralResult, QuadratureSpec, integrate_interval, integrate_sphere  # noqa: E402
