"""Exact Gaussian engine for the two-beam interferometer.

Quadratures are x = (a + a^dag)/2 and y = (a - a^dag)/(2i), so the vacuum
has variance 1/4 in each quadrature and a mode with mean vector m and 2x2
covariance block V carries <n> = tr(V) + |m|^2 - 1/2 photons.  Two-mode
quantities are ordered (x_a, y_a, x_b, y_b).

A squeezed-coherent beam with squeezing parameter r enters with quadrature
variances (e^{2r}/4, e^{-2r}/4); the whole interferometer at internal
phase shift phi acts on annihilation operators as

    a -> a cos(phi/2) - i b sin(phi/2)
    b -> b cos(phi/2) - i a sin(phi/2)

which `mz_map` encodes as a 4x4 symplectic matrix.  Everything here is a
pure function of its inputs; states and maps are plain value objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import xlogy

from .errors import ParameterDomainError, UnphysicalStateError

#: Variance of each vacuum quadrature in this convention.
VACUUM_VARIANCE = 0.25

#: Block-diagonal rotation generator; M is symplectic iff M @ OMEGA @ M.T == OMEGA.
SYMPLECTIC_FORM = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])

_MODE_SLICES = {"a": slice(0, 2), "b": slice(2, 4)}


def _mode_slice(mode: str) -> slice:
    try:
        return _MODE_SLICES[mode]
    except (KeyError, TypeError):
        raise ParameterDomainError(f"mode must be 'a' or 'b', got {mode!r}") from None


@dataclass(frozen=True)
class InputSpec:
    """One squeezed-coherent input beam.

    Parameters
    ----------
    alpha : complex
        Coherent amplitude (the beam carries |alpha|^2 coherent photons).
    r : float
        Squeezing parameter; the x quadrature variance is e^{2r}/4 and the
        squeezed part carries sinh^2(r) photons.
    """

    alpha: complex = 0.0
    r: float = 0.0

    @classmethod
    def from_energy(cls, n: float, gamma: float, phase: float = 0.0) -> "InputSpec":
        """Build a spec from mean photon number `n` and squeezing fraction `gamma`.

        The squeezed part carries sinh^2(r) = gamma * n photons, the
        coherent part |alpha|^2 = (1 - gamma) * n at the given phase.
        """
        if not 0.0 <= gamma <= 1.0:
            raise ParameterDomainError(
                f"squeezing fraction must lie in [0, 1], got {gamma}")
        if n < 0.0:
            raise ParameterDomainError(f"mean photon number must be >= 0, got {n}")
        amplitude = math.sqrt((1.0 - gamma) * n)
        alpha = complex(amplitude * math.cos(phase), amplitude * math.sin(phase))
        return cls(alpha=alpha, r=math.asinh(math.sqrt(gamma * n)))

    @property
    def mean_photons(self) -> float:
        return abs(complex(self.alpha)) ** 2 + math.sinh(self.r) ** 2

    @property
    def squeezing_fraction(self) -> float:
        total = self.mean_photons
        return math.sinh(self.r) ** 2 / total if total > 0.0 else 0.0


@dataclass
class TwoModeGaussianState:
    """Mean vector and symmetric covariance matrix of a two-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(4)
        self.cov = np.asarray(self.cov, dtype=float).reshape(4, 4)
        if np.abs(self.cov - self.cov.T).max() > 1e-12:
            raise UnphysicalStateError("covariance matrix is not symmetric")
        if self.symplectic_eigenvalues().min() < VACUUM_VARIANCE - 1e-10:
            raise UnphysicalStateError(
                "covariance matrix violates the uncertainty principle")

    def symplectic_eigenvalues(self) -> np.ndarray:
        """The two invariants nu_1 <= nu_2; both equal 1/4 for pure states."""
        eigs = np.linalg.eigvals(SYMPLECTIC_FORM @ self.cov)
        return np.sort(np.abs(eigs.imag))[::2]

    def mode_photons(self, mode: str) -> float:
        sl = _mode_slice(mode)
        return float(np.trace(self.cov[sl, sl]) + self.mean[sl] @ self.mean[sl] - 0.5)

    def total_photons(self) -> float:
        return self.mode_photons("a") + self.mode_photons("b")


@dataclass
class ReducedModeState:
    """Marginal of a single mode: 2-vector mean and 2x2 covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(2)
        self.cov = np.asarray(self.cov, dtype=float).reshape(2, 2)

    def validate(self) -> None:
        if np.abs(self.cov - self.cov.T).max() > 1e-12:
            raise UnphysicalStateError("reduced covariance is not symmetric")
        if float(np.linalg.det(self.cov)) < 1.0 / 16.0 - 1e-12:
            raise UnphysicalStateError(
                "reduced covariance violates the single-mode uncertainty bound")

    @property
    def mean_photons(self) -> float:
        value = self.cov[0, 0] + self.cov[1, 1] + self.mean @ self.mean - 0.5
        return float(max(value, 0.0))


@dataclass
class SymplecticMap:
    """Affine phase-space map: z -> matrix @ z + displacement."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float).reshape(4, 4)
        self.displacement = np.asarray(self.displacement, dtype=float).reshape(4)
        defect = self.matrix @ SYMPLECTIC_FORM @ self.matrix.T - SYMPLECTIC_FORM
        if np.abs(defect).max() > 1e-12:
            raise UnphysicalStateError("matrix does not preserve the symplectic form")

    def apply(self, state: TwoModeGaussianState) -> TwoModeGaussianState:
        """Propagate means and covariance through the map."""
        return TwoModeGaussianState(
            mean=self.matrix @ state.mean + self.displacement,
            cov=self.matrix @ state.cov @ self.matrix.T,
        )

    def compose(self, inner: "SymplecticMap") -> "SymplecticMap":
        """Map equal to applying `inner` first, then this map."""
        return SymplecticMap(
            matrix=self.matrix @ inner.matrix,
            displacement=self.matrix @ inner.displacement + self.displacement,
        )


def make_input_state(spec_a: InputSpec, spec_b: InputSpec) -> TwoModeGaussianState:
    """Product state of two squeezed-coherent beams."""
    alpha_a, alpha_b = complex(spec_a.alpha), complex(spec_b.alpha)
    mean = np.array([alpha_a.real, alpha_a.imag, alpha_b.real, alpha_b.imag])
    variances = []
    for spec in (spec_a, spec_b):
        variances += [math.exp(2.0 * spec.r) * VACUUM_VARIANCE,
                      math.exp(-2.0 * spec.r) * VACUUM_VARIANCE]
    return TwoModeGaussianState(mean=mean, cov=np.diag(variances))


def rotation_map(theta: float, mode: str) -> SymplecticMap:
    """Phase rotation of one mode, a -> e^{i theta} a."""
    c, s = math.cos(theta), math.sin(theta)
    matrix = np.eye(4)
    sl = _mode_slice(mode)
    matrix[sl, sl] = [[c, -s], [s, c]]
    return SymplecticMap(matrix=matrix)


def bs_map(theta: float) -> SymplecticMap:
    """Phase-free beam splitter, a -> a cos(theta) + b sin(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    matrix = np.array([
        [c, 0.0, s, 0.0],
        [0.0, c, 0.0, s],
        [-s, 0.0, c, 0.0],
        [0.0, -s, 0.0, c],
    ])
    return SymplecticMap(matrix=matrix)


def mz_map(phi: float) -> SymplecticMap:
    """Whole interferometer at internal phase shift `phi` (radians).

    Equivalent to a single beam splitter of transmissivity cos^2(phi/2)
    conjugated by pi/2 rotations of mode b, i.e. the composition
    rotation_map(pi/2, 'b') o bs_map(phi/2) o rotation_map(-pi/2, 'b'),
    with zero displacement.  phi = 0 is the identity.
    """
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    matrix = np.array([
        [c, 0.0, 0.0, s],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [-s, 0.0, 0.0, c],
    ])
    return SymplecticMap(matrix=matrix)


def reduce_mode(state: TwoModeGaussianState, mode: str) -> ReducedModeState:
    """Gaussian marginal of one mode (sub-block extraction)."""
    sl = _mode_slice(mode)
    reduced = ReducedModeState(mean=state.mean[sl].copy(), cov=state.cov[sl, sl].copy())
    reduced.validate()
    return reduced


def thermal_photons(reduced: ReducedModeState) -> float:
    """Occupation of the thermal state with the same entropy as `reduced`.

    The displacement is ignored; displacing a state never changes its
    entropy.  Tiny negative results from rounding clamp to zero.
    """
    det = float(np.linalg.det(reduced.cov))
    if det < 1.0 / 16.0 - 1e-8:
        raise UnphysicalStateError(
            f"reduced covariance determinant {det:.6g} is below the vacuum bound 1/16")
    nbar = (math.sqrt(max(16.0 * det, 0.0)) - 1.0) / 2.0
    return max(nbar, 0.0)


def thermal_entropy(n: float) -> float:
    """Entropy (natural log) of a thermal state with mean occupation `n`.

    g(n) = (1+n) ln(1+n) - n ln(n), with g(0) = 0 by continuity.
    """
    if n < 0.0:
        raise ParameterDomainError(f"occupation must be >= 0, got {n}")
    return float(xlogy(1.0 + n, 1.0 + n) - xlogy(n, n))


def thermal_entropy_inverse(entropy: float) -> float:
    """Occupation of the thermal state whose entropy equals `entropy`."""
    if entropy < 0.0:
        raise ParameterDomainError(f"entropy must be >= 0, got {entropy}")
    if entropy == 0.0:
        return 0.0
    upper = max(1.0, math.exp(entropy))
    return float(brentq(lambda n: thermal_entropy(n) - entropy, 0.0, upper, xtol=1e-14))


def thermal_photons_closed_form(r: float, phi: float) -> float:
    """Reduced-mode thermal occupation for equal inputs with squeezing `r`.

    Equals (sqrt(1 + sin^2(phi) sinh^2(2r)) - 1)/2; zero at phi = 0 and
    sinh^2(r) at phi = pi/2, matching the symplectic propagation exactly.
    """
    s2 = math.sinh(2.0 * r) ** 2
    return (math.sqrt(1.0 + math.sin(phi) ** 2 * s2) - 1.0) / 2.0


def entanglement_degree(spec_a: InputSpec, spec_b: InputSpec, phi: float) -> float:
    """Normalized excess entropy of the two output beams, in [0, 1].

    The total output state is pure, so the numerator is the sum of the two
    reduced entropies; the denominator is the entropy of thermal states
    carrying the actual output intensities (the most disordered single-mode
    states at those energies).  Vacuum output returns 0 by convention.
    """
    out = mz_map(phi).apply(make_input_state(spec_a, spec_b))
    numerator = 0.0
    denominator = 0.0
    for mode in ("a", "b"):
        reduced = reduce_mode(out, mode)
        numerator += thermal_entropy(thermal_photons(reduced))
        denominator += thermal_entropy(reduced.mean_photons)
    if denominator < 1e-14:
        return 0.0
    return min(max(numerator / denominator, 0.0), 1.0)


def entanglement_degree_asymptotic(n: float, gamma: float) -> float:
    """Leading high-intensity form 1 + ln(gamma)/ln(n) of the peak entanglement."""
    if gamma <= 0.0 or gamma > 1.0:
        raise ParameterDomainError(
            f"squeezing fraction must lie in (0, 1], got {gamma}")
    if n <= 1.0:
        raise ParameterDomainError(f"intensity must exceed 1, got {n}")
    return 1.0 + math.log(gamma) / math.log(n)
