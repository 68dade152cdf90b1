"""Fourth-order output observables and their fringe visibility.

Two detector signals are modeled: the product of the output photon numbers
(coincidence counting rate) and the squared difference of the output photon
numbers (squared difference photocurrent, a homodyne-like quantity).  Both
are evaluated exactly from the output Gaussian moments.  With
n = x^2 + y^2 - 1/2 per mode, cross-mode products reduce to plain Isserlis
moments of the quadratures, while same-mode squares pick up the
symmetric-ordering correction <n^2> = E[(x^2+y^2)^2] - E[x^2+y^2].

Visibility is (max - min)/(max + min) of a signal over one full period of
the internal phase shift, located by a uniform scan and sharpened by
golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterDomainError
from .gaussian import InputSpec, TwoModeGaussianState, make_input_state, mz_map

_TWO_PI = 2.0 * math.pi
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _pair_fourth_moment(mean, cov, i: int, j: int) -> float:
    """E[u_i^2 u_j^2] for two jointly Gaussian quadratures."""
    mu, mv = mean[i], mean[j]
    vu, vv, cuv = cov[i, i], cov[j, j], cov[i, j]
    return (vu * vv + 2.0 * cuv * cuv + vu * mv * mv + vv * mu * mu
            + 4.0 * mu * mv * cuv + mu * mu * mv * mv)


def _intensity_moments(state: TwoModeGaussianState, mode_index: int):
    """First and second moments of Q = x^2 + y^2 for one mode."""
    x, y = 2 * mode_index, 2 * mode_index + 1
    mean, cov = state.mean, state.cov
    q1 = cov[x, x] + cov[y, y] + mean[x] ** 2 + mean[y] ** 2
    ex4 = 3.0 * cov[x, x] ** 2 + 6.0 * cov[x, x] * mean[x] ** 2 + mean[x] ** 4
    ey4 = 3.0 * cov[y, y] ** 2 + 6.0 * cov[y, y] * mean[y] ** 2 + mean[y] ** 4
    q2 = ex4 + ey4 + 2.0 * _pair_fourth_moment(mean, cov, x, y)
    return q1, q2


def mean_photon_product(state: TwoModeGaussianState) -> float:
    """<n_a n_b> on a two-mode Gaussian state."""
    qa, _ = _intensity_moments(state, 0)
    qb, _ = _intensity_moments(state, 1)
    cross = sum(_pair_fourth_moment(state.mean, state.cov, i, j)
                for i in (0, 1) for j in (2, 3))
    return float(cross - 0.5 * qa - 0.5 * qb + 0.25)


def mean_photon_square(state: TwoModeGaussianState, mode: str) -> float:
    """<n^2> of one mode; the ordering correction subtracts E[x^2 + y^2]."""
    index = {"a": 0, "b": 1}.get(mode)
    if index is None:
        raise ParameterDomainError(f"mode must be 'a' or 'b', got {mode!r}")
    q1, q2 = _intensity_moments(state, index)
    return float(q2 - q1)


def mean_squared_difference(state: TwoModeGaussianState) -> float:
    """<(n_a - n_b)^2> on a two-mode Gaussian state."""
    return (mean_photon_square(state, "a") + mean_photon_square(state, "b")
            - 2.0 * mean_photon_product(state))


def coincidence_rate(spec_a: InputSpec, spec_b: InputSpec, phi: float) -> float:
    """<n_a n_b> at the interferometer output, analytic path."""
    return mean_photon_product(mz_map(phi).apply(make_input_state(spec_a, spec_b)))


def squared_difference(spec_a: InputSpec, spec_b: InputSpec, phi: float) -> float:
    """<(n_a - n_b)^2> at the interferometer output, analytic path."""
    return mean_squared_difference(mz_map(phi).apply(make_input_state(spec_a, spec_b)))


@dataclass(frozen=True)
class PhiScan:
    """Extremum search settings over one period of the internal phase."""

    grid_points: int = 1024
    refine_tol: float = 1e-6

    def __post_init__(self):
        if self.grid_points < 16:
            raise ParameterDomainError(
                f"grid must have at least 16 points, got {self.grid_points}")
        if self.refine_tol <= 0.0:
            raise ParameterDomainError("refinement tolerance must be positive")


@dataclass(frozen=True)
class VisibilityResult:
    """Fringe visibility of one observable, with the located extrema."""

    value: float
    phi_max: float
    phi_min: float
    f_max: float
    f_min: float
    engine: str = "gaussian"
    zero_signal: bool = False


def _golden_section_min(f, lo: float, hi: float, tol: float):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def visibility(signal, scan: PhiScan | None = None,
               engine: str = "gaussian") -> VisibilityResult:
    """Fringe visibility of a nonnegative periodic signal of the phase shift.

    `signal` is evaluated on a uniform grid over [0, 2 pi); the global
    maximum and minimum brackets are then refined by golden section to
    scan.refine_tol.  An identically zero signal yields visibility 0 with
    zero_signal set.
    """
    scan = scan or PhiScan()
    step = _TWO_PI / scan.grid_points
    grid = [k * step for k in range(scan.grid_points)]
    values = [float(signal(phi)) for phi in grid]

    imax = max(range(len(values)), key=values.__getitem__)
    imin = min(range(len(values)), key=values.__getitem__)

    x_max, neg = _golden_section_min(lambda t: -signal(t),
                                     grid[imax] - step, grid[imax] + step,
                                     scan.refine_tol)
    f_max, phi_max = -neg, x_max % _TWO_PI
    if values[imax] > f_max:
        f_max, phi_max = values[imax], grid[imax]

    x_min, f_min = _golden_section_min(signal, grid[imin] - step,
                                       grid[imin] + step, scan.refine_tol)
    phi_min = x_min % _TWO_PI
    if values[imin] < f_min:
        f_min, phi_min = values[imin], grid[imin]

    # rounding can push an exact zero minimum slightly negative
    if f_min < 0.0:
        if f_min < -1e-9 * (1.0 + abs(f_max)):
            raise ParameterDomainError(
                f"signal is not nonnegative: min {f_min:.3e}")
        f_min = 0.0

    total = f_max + f_min
    if total <= 0.0:
        return VisibilityResult(value=0.0, phi_max=phi_max, phi_min=phi_min,
                                f_max=f_max, f_min=f_min, engine=engine,
                                zero_signal=True)
    return VisibilityResult(value=(f_max - f_min) / total, phi_max=phi_max,
                            phi_min=phi_min, f_max=f_max, f_min=f_min,
                            engine=engine)


def coincidence_visibility(spec_a: InputSpec, spec_b: InputSpec,
                           scan: PhiScan | None = None) -> VisibilityResult:
    """Visibility of the coincidence rate fringes, analytic path."""
    return visibility(lambda phi: coincidence_rate(spec_a, spec_b, phi), scan)


def difference_visibility(spec_a: InputSpec, spec_b: InputSpec,
                          scan: PhiScan | None = None) -> VisibilityResult:
    """Visibility of the squared-difference photocurrent fringes, analytic path."""
    return visibility(lambda phi: squared_difference(spec_a, spec_b, phi), scan)


def difference_visibility_asymptotic(n: float, gamma: float) -> float:
    """High-intensity form 1 + (ln(gamma)/5)/ln(n) of the difference visibility.

    The coefficient ln(gamma)/5 is an empirical fit, so agreement is only
    rough; treat this as a sanity reference, not an oracle.
    """
    if gamma <= 0.0 or gamma > 1.0:
        raise ParameterDomainError(
            f"squeezing fraction must lie in (0, 1], got {gamma}")
    if n <= 1.0:
        raise ParameterDomainError(f"intensity must exceed 1, got {n}")
    return 1.0 + 0.2 * math.log(gamma) / math.log(n)
