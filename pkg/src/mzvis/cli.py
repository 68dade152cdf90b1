"""Command-line driver emitting deterministic CSV.

One executable, one --command selecting what to sweep:

  point     single (N, gamma, phi) evaluation
  fig2a     entanglement over a (gamma, phi) grid at fixed N
  fig2b     entanglement over N for a set of squeezing fractions, phi = pi/2
  fig3      peak entanglement for unequal fractions (gamma1, gamma2) at fixed N
  fig4a     coincidence-rate visibility over N per squeezing fraction
  fig4b     squared-difference visibility over N per squeezing fraction
  compare   analytic vs number-basis engines on a fixed 36-point grid

Flags may also come from a key=value config file (--config); command-line
values win.  Exit codes: 0 success, 2 argument or domain error,
3 numerical or truncation failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from .errors import ParameterDomainError, TruncationError, UnphysicalStateError
from .gaussian import (InputSpec, entanglement_degree, make_input_state, mz_map,
                       reduce_mode, thermal_entropy_inverse, thermal_photons)
from . import fock
from .observables import (PhiScan, coincidence_rate, mean_photon_product,
                          mean_squared_difference, squared_difference, visibility)

COMMANDS = ("point", "fig2a", "fig2b", "fig3", "fig4a", "fig4b", "compare")
ENGINES = ("gaussian", "fock", "both")

_CONFIG_KEYS = ("command", "n", "gamma", "gamma2", "phi", "grid", "dim",
                "tail_tol", "engine", "output", "precision")

_GAMMA_SET = (0.2, 0.4, 0.6, 0.8, 1.0)
_GAMMA2_SET = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

# the engine cross-check grid and its tolerances
_COMPARE_N = (0.5, 1.0, 3.0)
_COMPARE_GAMMA = (0.0, 0.5, 1.0)
_COMPARE_PHI = (0.0, math.pi / 8, math.pi / 4, math.pi / 2)
_EPS_TOL = 2e-3
_KH_REL_TOL = 1e-3

_ANGLE_RE = re.compile(
    r"^\s*([+-]?)\s*(\d+\.?\d*|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$",
    re.IGNORECASE)


def parse_angle(text) -> float:
    """Parse an angle in radians; 'pi', 'pi/2', '3pi/4', '-pi/2' also work."""
    if isinstance(text, (int, float)):
        return float(text)
    match = _ANGLE_RE.match(text)
    if match:
        sign = -1.0 if match.group(1) == "-" else 1.0
        numerator = float(match.group(2)) if match.group(2) else 1.0
        denominator = float(match.group(3)) if match.group(3) else 1.0
        if denominator == 0.0:
            raise ParameterDomainError(f"zero denominator in angle {text!r}")
        return sign * numerator * math.pi / denominator
    try:
        return float(text)
    except ValueError:
        raise ParameterDomainError(f"cannot parse angle {text!r}") from None


def _load_config(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterDomainError(f"config line has no '=': {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ParameterDomainError(f"unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzvis",
        description="Entanglement and fringe visibility of a Mach-Zehnder "
                    "interferometer fed by two squeezed-coherent beams.",
        epilog="Config file: key=value lines with '#' comments, keys matching "
               "the flag names (command, n, gamma, gamma2, phi, grid, dim, "
               "tail-tol, engine, output, precision); command-line flags "
               "override. Exit codes: 0 success, 2 bad parameters, "
               "3 truncation/numerical failure.")
    parser.add_argument("--command", choices=COMMANDS,
                        help="what to compute (see module docs)")
    parser.add_argument("--n", help="mean photons per input beam (default 3)")
    parser.add_argument("--gamma", help="squeezing fraction of both beams (default 1)")
    parser.add_argument("--gamma2",
                        help="fig3: squeezing fraction of beam b (default: sweep a set)")
    parser.add_argument("--phi",
                        help="internal phase shift, radians; accepts 'pi/2' forms "
                             "(default pi/2)")
    parser.add_argument("--grid", help="grid points per sweep axis "
                                       "(default 33; N sweeps default 40)")
    parser.add_argument("--dim", help="number-basis dimension per mode, integer "
                                      "or 'auto' (default auto)")
    parser.add_argument("--tail-tol", dest="tail_tol",
                        help="acceptable truncation loss (default 1e-6)")
    parser.add_argument("--engine", choices=ENGINES,
                        help="computation path for point/figs (default gaussian; "
                             "point also accepts both)")
    parser.add_argument("--output", help="output CSV path, '-' for stdout (default)")
    parser.add_argument("--precision", help="significant digits in CSV cells, "
                                            "3..17 (default 9)")
    parser.add_argument("--config", help="key=value config file")
    return parser


def _converted(kind, key, value):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ParameterDomainError(
            f"cannot read {key}={value!r} as {kind.__name__}") from None


class RunConfig:
    """Merged command-line / config-file / default settings."""

    def __init__(self, args: argparse.Namespace):
        file_values = _load_config(args.config) if args.config else {}

        def pick(key, fallback=None):
            cli = getattr(args, key)
            return cli if cli is not None else file_values.get(key, fallback)

        self.command = pick("command")
        if self.command not in COMMANDS:
            raise ParameterDomainError(
                f"--command is required and must be one of {', '.join(COMMANDS)}")
        self.n = _converted(float, "n", pick("n", 3.0))
        # fig sweeps fall back to a fraction set unless gamma was given explicitly
        self.gamma_given = pick("gamma") is not None
        self.gamma = _converted(float, "gamma", pick("gamma", 1.0))
        gamma2 = pick("gamma2")
        self.gamma2 = None if gamma2 is None else _converted(float, "gamma2", gamma2)
        self.phi = parse_angle(pick("phi", math.pi / 2))
        grid = pick("grid")
        self.grid = None if grid is None else _converted(int, "grid", grid)
        dim = pick("dim", "auto")
        self.dim = "auto" if str(dim).lower() == "auto" else _converted(int, "dim", dim)
        self.tail_tol = _converted(float, "tail-tol",
                                   pick("tail_tol", fock.DEFAULT_TAIL_TOL))
        self.engine = pick("engine", "gaussian")
        if self.engine not in ENGINES:
            raise ParameterDomainError(f"engine must be one of {ENGINES}")
        self.output = pick("output", "-")
        self.precision = _converted(int, "precision", pick("precision", 9))
        if not 3 <= self.precision <= 17:
            raise ParameterDomainError(
                f"precision must lie in [3, 17], got {self.precision}")
        if self.n < 0.0:
            raise ParameterDomainError(f"n must be >= 0, got {self.n}")

    def sweep_grid(self, default: int) -> int:
        count = self.grid if self.grid is not None else default
        if count < 16:
            raise ParameterDomainError(f"grid must be >= 16 points, got {count}")
        return count

    def cutoff_for(self, spec_a: InputSpec, spec_b: InputSpec,
                   phi: float) -> fock.FockCutoff:
        if self.dim == "auto":
            return fock.auto_cutoff(spec_a, spec_b, phi, self.tail_tol)
        return fock.FockCutoff(dim=self.dim, tail_tol=self.tail_tol)


def _gaussian_point(spec: InputSpec, phi: float):
    out = mz_map(phi).apply(make_input_state(spec, spec))
    n_phi = thermal_photons(reduce_mode(out, "a"))
    return (entanglement_degree(spec, spec, phi), n_phi,
            mean_photon_product(out), mean_squared_difference(out))


def _fock_point(spec: InputSpec, phi: float, cutoff: fock.FockCutoff):
    out = fock.evolve(fock.build_input(spec, spec, cutoff), phi)
    entropy_a = fock.von_neumann_entropy(fock.reduced_density(out, "a"))
    return (fock.entanglement_degree_fock(spec, spec, phi, cutoff),
            thermal_entropy_inverse(entropy_a),
            fock.photon_product_expectation(out),
            fock.squared_difference_expectation(out),
            max(out.norm_deficit, 0.0))


def _cmd_point(cfg: RunConfig):
    header = ["engine", "N", "gamma", "phi", "epsilon", "n_phi", "K", "H",
              "d_epsilon", "d_K", "d_H"]
    spec = InputSpec.from_energy(cfg.n, cfg.gamma)
    rows = []
    gauss = None
    if cfg.engine in ("gaussian", "both"):
        gauss = _gaussian_point(spec, cfg.phi)
        rows.append(["gaussian", cfg.n, cfg.gamma, cfg.phi, *gauss,
                     None, None, None])
    if cfg.engine in ("fock", "both"):
        cutoff = cfg.cutoff_for(spec, spec, cfg.phi)
        eps, n_phi, k_val, h_val, _ = _fock_point(spec, cfg.phi, cutoff)
        deltas = [None, None, None]
        if gauss is not None:
            deltas = [abs(eps - gauss[0]), abs(k_val - gauss[2]),
                      abs(h_val - gauss[3])]
        rows.append(["fock", cfg.n, cfg.gamma, cfg.phi, eps, n_phi,
                     k_val, h_val, *deltas])
    return header, rows, 0


def _cmd_fig2a(cfg: RunConfig):
    count = cfg.sweep_grid(33)
    gammas = np.linspace(0.0, 1.0, count)
    phis = np.linspace(0.0, math.pi / 2, count)
    rows = []
    for gamma in gammas:
        spec = InputSpec.from_energy(cfg.n, float(gamma))
        for phi in phis:
            rows.append([float(gamma), float(phi),
                         entanglement_degree(spec, spec, float(phi))])
    return ["gamma", "phi", "epsilon"], rows, 0


def _intensity_sweep(cfg: RunConfig):
    count = cfg.sweep_grid(40)
    return np.geomspace(0.1, 50.0, count)


def _cmd_fig2b(cfg: RunConfig):
    gammas = (cfg.gamma,) if cfg.gamma_given else _GAMMA_SET
    rows = []
    for gamma in gammas:
        for n in _intensity_sweep(cfg):
            spec = InputSpec.from_energy(float(n), float(gamma))
            rows.append([float(n), float(gamma),
                         entanglement_degree(spec, spec, math.pi / 2)])
    return ["N", "gamma", "epsilon"], rows, 0


def _cmd_fig3(cfg: RunConfig):
    count = cfg.sweep_grid(33)
    gamma1_grid = np.linspace(0.0, 1.0, count)
    gamma2_set = (cfg.gamma2,) if cfg.gamma2 is not None else _GAMMA2_SET
    rows = []
    for gamma2 in gamma2_set:
        spec_b = InputSpec.from_energy(cfg.n, float(gamma2))
        for gamma1 in gamma1_grid:
            spec_a = InputSpec.from_energy(cfg.n, float(gamma1))
            rows.append([float(gamma1), float(gamma2),
                         entanglement_degree(spec_a, spec_b, math.pi / 2)])
    return ["gamma1", "gamma2", "epsilon"], rows, 0


def _cmd_fig4(cfg: RunConfig, kind: str):
    gammas = (cfg.gamma,) if cfg.gamma_given else _GAMMA_SET
    column = "V_K" if kind == "K" else "V_H"
    rows = []
    for gamma in gammas:
        for n in _intensity_sweep(cfg):
            spec = InputSpec.from_energy(float(n), float(gamma))
            rows.append([float(n), float(gamma),
                         _visibility_value(cfg, spec, kind)])
    return ["N", "gamma", column], rows, 0


def _visibility_value(cfg: RunConfig, spec: InputSpec, kind: str) -> float:
    if cfg.engine == "gaussian":
        if kind == "K":
            signal = lambda phi: coincidence_rate(spec, spec, phi)
        else:
            signal = lambda phi: squared_difference(spec, spec, phi)
    elif cfg.engine == "fock":
        # one cutoff for the whole scan, sized at maximum mixing
        cutoff = cfg.cutoff_for(spec, spec, math.pi / 2)
        psi_in = fock.build_input(spec, spec, cutoff)
        measure = (fock.photon_product_expectation if kind == "K"
                   else fock.squared_difference_expectation)
        signal = lambda phi: measure(fock.evolve(psi_in, phi))
    else:
        raise ParameterDomainError("visibility sweeps support engine gaussian or fock")
    return visibility(signal, PhiScan(), engine=cfg.engine).value


def _cmd_compare(cfg: RunConfig):
    header = ["N", "gamma", "phi", "d_epsilon", "d_K", "d_H", "D_used", "tail"]
    rows = []
    worst = {"d_epsilon": 0.0, "d_K": 0.0, "d_H": 0.0}
    breach = None
    for n in _COMPARE_N:
        for gamma in _COMPARE_GAMMA:
            spec = InputSpec.from_energy(n, gamma)
            for phi in _COMPARE_PHI:
                cutoff = cfg.cutoff_for(spec, spec, phi)
                eps_g, _, k_g, h_g = _gaussian_point(spec, phi)
                eps_f, _, k_f, h_f, deficit = _fock_point(spec, phi, cutoff)
                d_eps, d_k, d_h = abs(eps_g - eps_f), abs(k_g - k_f), abs(h_g - h_f)
                rows.append([n, gamma, phi, d_eps, d_k, d_h, cutoff.dim, deficit])
                worst["d_epsilon"] = max(worst["d_epsilon"], d_eps)
                worst["d_K"] = max(worst["d_K"], d_k)
                worst["d_H"] = max(worst["d_H"], d_h)
                ok = (d_eps <= _EPS_TOL and d_k <= _KH_REL_TOL * (1.0 + abs(k_g))
                      and d_h <= _KH_REL_TOL * (1.0 + abs(h_g)))
                if not ok and breach is None:
                    breach = (n, gamma, phi, d_eps, d_k, d_h)
    print("compare summary: max d_epsilon={d_epsilon:.3e} max d_K={d_K:.3e} "
          "max d_H={d_H:.3e}".format(**worst), file=sys.stderr)
    if breach is not None:
        print(f"compare tolerance breach at N={breach[0]} gamma={breach[1]} "
              f"phi={breach[2]:.6f}: d_epsilon={breach[3]:.3e} "
              f"d_K={breach[4]:.3e} d_H={breach[5]:.3e}", file=sys.stderr)
        return header, rows, 3
    return header, rows, 0


def _dispatch(cfg: RunConfig):
    if cfg.command == "point":
        return _cmd_point(cfg)
    if cfg.command == "fig2a":
        return _cmd_fig2a(cfg)
    if cfg.command == "fig2b":
        return _cmd_fig2b(cfg)
    if cfg.command == "fig3":
        return _cmd_fig3(cfg)
    if cfg.command == "fig4a":
        return _cmd_fig4(cfg, "K")
    if cfg.command == "fig4b":
        return _cmd_fig4(cfg, "H")
    return _cmd_compare(cfg)


def render_csv(header, rows, precision: int) -> str:
    """CSV text with LF endings and locale-independent number formatting."""

    def cell(value):
        if value is None:
            return ""
        if isinstance(value, str):
            return value
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        return format(float(value), f".{precision}g")

    lines = [",".join(header)]
    lines.extend(",".join(cell(value) for value in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_output(text: str, destination: str) -> None:
    if destination in ("-", "", None):
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args)
        header, rows, code = _dispatch(cfg)
        _write_output(render_csv(header, rows, cfg.precision), cfg.output)
        return code
    except ParameterDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TruncationError, UnphysicalStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
