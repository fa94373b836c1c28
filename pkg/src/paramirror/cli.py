"""Command-line front end: ``paramirror {eta,pattern,modes,verify}``.

Lengths are given in millimetres and wavelengths in nanometres; everything is
converted once to a :class:`MirrorSpec` in millimetre units. Options may also
come from a JSON config file (``--config``) whose keys mirror
:class:`RunConfig`; command-line flags take precedence.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .emission import AtomPosition, decay_scan
from .modes import MirrorSpec, mu_quantized
from .output import (
    SCHEMA_VERSION,
    csv_text,
    heatmap_svg,
    json_text,
    line_plot_svg,
    manifest_path,
    table_json,
    write_text,
)
from .pattern import ScreenGrid, pattern_grid
from .quadrature import QuadratureSpec
from .verify import format_table, run_verification

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 2, 3, 4
DEFAULT_WAVELENGTH_NM = 250.0


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    f_mm: float = 2.0
    wavelength_nm: float | None = None
    k_per_mm: float | None = None
    x_mm: float = 0.0
    y_mm: float = 0.0
    z_mm: float = 0.0
    rel_tol: float = 1e-10
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.wavelength_nm is None and self.k_per_mm is None:
            self.wavelength_nm = DEFAULT_WAVELENGTH_NM
        if self.wavelength_nm is not None and self.k_per_mm is not None:
            raise UsageError("give exactly one of wavelength_nm / k_per_mm")
        if not self.f_mm > 0:
            raise UsageError(f"focal length must be positive, got {self.f_mm}")
        if self.wavelength_nm is not None and not self.wavelength_nm > 0:
            raise UsageError(f"wavelength must be positive, got {self.wavelength_nm}")
        if self.k_per_mm is not None and not self.k_per_mm > 0:
            raise UsageError(f"wavenumber must be positive, got {self.k_per_mm}")
        if self.format not in ("csv", "json", "svg"):
            raise UsageError(f"unknown format {self.format!r}")
        if not self.rel_tol > 0:
            raise UsageError(f"rel_tol must be positive, got {self.rel_tol}")

    @property
    def k(self) -> float:
        if self.k_per_mm is not None:
            return self.k_per_mm
        return 2.0 * math.pi / (self.wavelength_nm * 1e-6)

    def mirror(self) -> MirrorSpec:
        return MirrorSpec(self.f_mm, self.k)

    def atom(self) -> AtomPosition:
        return AtomPosition.at(self.x_mm, self.y_mm, self.z_mm)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    cli = {key: getattr(args, key) for key in _CONFIG_KEYS if getattr(args, key, None) is not None}
    if "wavelength_nm" in cli or "k_per_mm" in cli:
        values.pop("wavelength_nm", None)
        values.pop("k_per_mm", None)
    values.update(cli)
    return RunConfig(**values)


def derived_parameters(cfg: RunConfig) -> dict:
    spec = cfg.mirror()
    out = {
        "k_per_mm": spec.k,
        "kf": spec.kf,
        "theta0": spec.theta0,
        "a": spec.k * (cfg.z_mm + spec.f),
    }
    if spec.kf > 0.5:
        out["L"] = spec.log_2kf
    return out


def _manifest(cfg: RunConfig, command: str, argv: list[str], started: float, extra: dict | None = None) -> dict:
    body = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "command": command,
        "argv": list(argv),
        "config": asdict(cfg),
        "derived": derived_parameters(cfg),
        "wall_time_s": time.perf_counter() - started,
    }
    if extra:
        body.update(extra)
    return body


def _emit(cfg: RunConfig, text: str, manifest: dict) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    out = Path(cfg.out)
    write_text(out, text)
    manifest["output"] = str(out)
    write_text(manifest_path(out), json_text(manifest))


# --- subcommands -------------------------------------------------------------

def cmd_eta(args, cfg: RunConfig, argv, started) -> int:
    spec = cfg.mirror()
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if not args.z_min < args.z_max:
        raise UsageError(f"need --z-min < --z-max, got {args.z_min} and {args.z_max}")
    if args.z_min < -spec.f:
        raise UsageError(f"--z-min {args.z_min} lies behind the mirror vertex at z = {-spec.f} mm")
    scan = decay_scan(spec, args.z_min, args.z_max, args.n, args.with_quadrature, cfg.quadrature())
    columns = ["z_mm", "a", "eta_closed"]
    if args.with_quadrature:
        columns += ["eta_quad", "quad_err"]
        rows = [(r.z, r.a, r.eta_closed, r.eta_quadrature, r.quad_error) for r in scan.rows]
    else:
        rows = [(r.z, r.a, r.eta_closed) for r in scan.rows]

    if cfg.format == "csv":
        text = csv_text(columns, rows)
    elif cfg.format == "json":
        text = table_json(columns, rows)
    else:
        series = {"closed form": [r.eta_closed for r in scan.rows]}
        if args.with_quadrature:
            series["quadrature"] = [r.eta_quadrature for r in scan.rows]
        text = line_plot_svg([r.z for r in scan.rows], series, "z [mm]", "eta")
    extra = {"scan": {"z_min": args.z_min, "z_max": args.z_max, "n": args.n,
                      "with_quadrature": bool(args.with_quadrature)}}
    _emit(cfg, text, _manifest(cfg, "eta", argv, started, extra))

    unconverged = sum(not r.converged for r in scan.rows)
    if unconverged:
        print(f"warning: {unconverged} scan points did not reach the quadrature tolerance", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_pattern(args, cfg: RunConfig, argv, started) -> int:
    spec = cfg.mirror()
    atom = cfg.atom()
    if not atom.inside(spec):
        raise UsageError(f"atom at ({cfg.x_mm}, {cfg.y_mm}, {cfg.z_mm}) mm lies outside the mirror")
    rho_max = args.rho_max_mm if args.rho_max_mm is not None else 4.0 * spec.f
    try:
        grid = ScreenGrid(rho_max, args.n_radial, args.n_azimuthal, args.aperture_mm)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = pattern_grid(spec, atom, grid, per_solid_angle=args.per_solid_angle)
    asym = result.azimuthal_asymmetry()
    columns = ["rho_mm", "phi_rad", "intensity"]
    if cfg.format == "csv":
        text = csv_text(columns, result.rows())
    elif cfg.format == "json":
        text = table_json(columns, result.rows(),
                          meta={"dark_ring_radii_mm": result.dark_ring_radii, "azimuthal_asymmetry": asym})
    else:
        text = heatmap_svg(result.rho, result.phi, result.intensity)
    extra = {
        "grid": asdict(grid),
        "per_solid_angle": bool(args.per_solid_angle),
        "dark_ring_radii_mm": result.dark_ring_radii,
        "azimuthal_asymmetry": asym,
        "azimuthally_symmetric": asym == 0.0,
    }
    _emit(cfg, text, _manifest(cfg, "pattern", argv, started, extra))
    if cfg.out is not None:
        rings = ", ".join(f"{r:.6g}" for r in result.dark_ring_radii) or "none"
        print(f"dark rings [mm]: {rings}")
        print(f"azimuthal asymmetry: {asym:.3e}")
    return EXIT_OK


def cmd_modes(args, cfg: RunConfig, argv, started) -> int:
    spec = cfg.mirror()
    if spec.kf <= 0.5:
        raise UsageError(f"discrete modes need kf > 1/2, got kf = {spec.kf:.6g}")
    if args.m_max < 0:
        raise UsageError("--m-max must be non-negative")
    header = {"kf": spec.kf, "L": spec.log_2kf, "theta0": spec.theta0, "mu_spacing": math.pi / spec.log_2kf}
    rows = [(m, mu_quantized(m, spec)) for m in range(1, args.m_max + 1)]
    columns = ["m", "mu_m"]
    if cfg.format == "csv":
        text = csv_text(columns, rows, comments=[f"{k}={v!r}" for k, v in header.items()])
    elif cfg.format == "json":
        text = table_json(columns, rows, meta=header)
    else:
        text = line_plot_svg([r[0] for r in rows] or [0], {"mu_m": [r[1] for r in rows] or [0.0]}, "m", "mu_m")
    _emit(cfg, text, _manifest(cfg, "modes", argv, started, {"modes": header, "m_max": args.m_max}))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig, argv, started) -> int:
    checks = run_verification(cfg.quadrature())
    print(format_table(checks))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("configuration")
    g.add_argument("--config", metavar="PATH", help="JSON file with RunConfig keys")
    g.add_argument("--f-mm", dest="f_mm", type=float, help="focal length [mm] (default 2)")
    wave = g.add_mutually_exclusive_group()
    wave.add_argument("--wavelength-nm", dest="wavelength_nm", type=float,
                      help="transition wavelength [nm] (default 250)")
    wave.add_argument("--k-per-mm", dest="k_per_mm", type=float, help="wavenumber [1/mm]")
    g.add_argument("--x-mm", dest="x_mm", type=float, help="atom x relative to the focus [mm]")
    g.add_argument("--y-mm", dest="y_mm", type=float, help="atom y relative to the focus [mm]")
    g.add_argument("--z-mm", dest="z_mm", type=float, help="atom z relative to the focus [mm]")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
    g.add_argument("--format", choices=("csv", "json", "svg"), help="output format (default csv)")
    g.add_argument("--out", metavar="PATH", help="output file; a .manifest.json is written beside it")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramirror",
        description="Emission-rate modification of a dipole at the focus of a parabolic mirror.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eta", help="scan the on-axis rate ratio along z")
    _common(p)
    p.add_argument("--z-min", dest="z_min", type=float, required=True, help="[mm]")
    p.add_argument("--z-max", dest="z_max", type=float, required=True, help="[mm]")
    p.add_argument("--n", type=int, default=200, help="number of grid points")
    p.add_argument("--with-quadrature", action="store_true",
                   help="also integrate the angular density numerically at each point")
    p.set_defaults(handler=cmd_eta)

    p = sub.add_parser("pattern", help="screen interference pattern")
    _common(p)
    p.add_argument("--rho-max-mm", dest="rho_max_mm", type=float, help="screen radius [mm] (default 4 f)")
    p.add_argument("--n-radial", dest="n_radial", type=int, default=201)
    p.add_argument("--n-azimuthal", dest="n_azimuthal", type=int, default=64)
    p.add_argument("--aperture-mm", dest="aperture_mm", type=float, help="mirror aperture radius [mm]")
    p.add_argument("--per-solid-angle", action="store_true",
                   help="report intensity per solid angle instead of per screen area")
    p.set_defaults(handler=cmd_pattern)

    p = sub.add_parser("modes", help="table of quantised mode numbers")
    _common(p)
    p.add_argument("--m-max", dest="m_max", type=int, default=10)
    p.set_defaults(handler=cmd_modes)

    p = sub.add_parser("verify", help="run the built-in self-checks")
    _common(p)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = make_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = build_config(args)
        return args.handler(args, cfg, argv, started)
    except (UsageError, ValueError) as exc:
        print(f"paramirror {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
