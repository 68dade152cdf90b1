"""Brute-force engine on a truncated number basis.

Independent cross-check for the Gaussian engine: states are vectors over a
per-mode basis of dimension `dim` (two-mode vectors have length dim**2,
(n_a, n_b) in row-major order) and every quantity is computed by direct
matrix algebra.  Evolution through the interferometer uses a Krylov
matrix-exponential product on the sparse mixing generator, so only the
construction of `mz_unitary` itself is dim^2 x dim^2 dense; keep `dim`
modest (hard cap 256 by default).

One truncation subtlety drives the adequacy checks below: the exponential
of a truncated generator is exactly unitary no matter how small the basis
is, so the norm of a constructed state can never reveal that the basis was
too small.  `build_input` therefore also checks the beam energy, and
`auto_cutoff` estimates the true tail mass in a probe basis twice as large.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.sparse import diags, kron as sparse_kron
from scipy.sparse.linalg import expm_multiply

from .errors import ParameterDomainError, TruncationError, UnphysicalStateError
from .gaussian import InputSpec, thermal_entropy

DEFAULT_TAIL_TOL = 1e-6
DIM_CAP = 256
_DOUBLING = (2, 4, 8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class FockCutoff:
    """Truncation settings: per-mode dimension and acceptable lost probability."""

    dim: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ParameterDomainError(f"dimension must be an integer >= 2, got {self.dim}")
        if not 0.0 < self.tail_tol <= 1e-4:
            raise ParameterDomainError(
                f"tail tolerance must lie in (0, 1e-4], got {self.tail_tol}")


@dataclass
class TwoModeFockVector:
    """State vector over the truncated two-mode number basis."""

    amplitudes: np.ndarray
    cutoff: FockCutoff

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(
            self.cutoff.dim ** 2)
        deficit = self.norm_deficit
        if deficit > self.cutoff.tail_tol:
            raise TruncationError(
                f"state lost probability {deficit:.3e}, above {self.cutoff.tail_tol:.1e}")

    @property
    def dim(self) -> int:
        return self.cutoff.dim

    @property
    def norm_deficit(self) -> float:
        return 1.0 - float(np.vdot(self.amplitudes, self.amplitudes).real)

    def joint_probabilities(self) -> np.ndarray:
        """dim x dim array of |<n_a, n_b | psi>|^2."""
        return np.abs(self.amplitudes.reshape(self.dim, self.dim)) ** 2

    def mode_occupations(self, mode: str) -> np.ndarray:
        p = self.joint_probabilities()
        if mode == "a":
            return p.sum(axis=1)
        if mode == "b":
            return p.sum(axis=0)
        raise ParameterDomainError(f"mode must be 'a' or 'b', got {mode!r}")


@dataclass
class ModeDensity:
    """Single-mode density matrix on the truncated basis."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ParameterDomainError("density matrix must be square")

    def validate(self, tail_tol: float = 1e-4) -> None:
        if np.abs(self.matrix - self.matrix.conj().T).max() > 1e-12:
            raise UnphysicalStateError("density matrix is not Hermitian")
        eigs = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2.0)
        if eigs.min() < -1e-10:
            raise UnphysicalStateError(
                f"density matrix has eigenvalue {eigs.min():.3e}")
        trace = float(np.trace(self.matrix).real)
        if not 1.0 - tail_tol <= trace <= 1.0 + 1e-12:
            raise UnphysicalStateError(f"density matrix trace {trace:.8f} is off unit")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def mean_photons(self) -> float:
        value = float(np.arange(self.dim) @ np.diag(self.matrix).real)
        return max(value, 0.0)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@lru_cache(maxsize=None)
def ladder_ops(dim: int):
    """Truncated (annihilation, creation, number) matrices, cached read-only.

    number is creation @ annihilation by construction, diagonal (0 .. dim-1).
    """
    if dim < 2:
        raise ParameterDomainError(f"dimension must be >= 2, got {dim}")
    lower = np.diag(np.sqrt(np.arange(1.0, dim)), k=1)
    raise_ = lower.conj().T.copy()
    number = raise_ @ lower
    for matrix in (lower, raise_, number):
        matrix.setflags(write=False)
    return lower, raise_, number


def _check_columns(matrix: np.ndarray, label: str, tol: float = 1e-8) -> None:
    # exp of an anti-Hermitian generator stays unitary even truncated; this
    # only guards against a defective matrix exponential
    defect = np.abs(np.linalg.norm(matrix, axis=0) - 1.0).max()
    if defect > tol:
        raise TruncationError(f"{label} matrix columns deviate from unit norm by {defect:.3e}")


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """exp(alpha a^dag - conj(alpha) a) on the truncated basis."""
    alpha = complex(alpha)
    if abs(alpha) ** 2 > dim / 4.0:
        warnings.warn(
            f"displacement energy |alpha|^2 = {abs(alpha) ** 2:.3g} is large for "
            f"dimension {dim}; expect truncation bias", stacklevel=2)
    lower, raise_, _ = ladder_ops(dim)
    matrix = expm(alpha * raise_ - alpha.conjugate() * lower)
    _check_columns(matrix, "displacement")
    return matrix


def squeeze_matrix(r: float, dim: int) -> np.ndarray:
    """exp((r/2)(a^dag^2 - a^2)); stretches the x quadrature by e^r.

    Even-level amplitudes of squeeze_matrix(r, dim) @ |0> are positive for
    r > 0, with successive ratios approaching tanh(r).
    """
    if math.sinh(r) ** 2 > dim / 6.0:
        warnings.warn(
            f"squeezing energy sinh^2(r) = {math.sinh(r) ** 2:.3g} is large for "
            f"dimension {dim}; expect truncation bias", stacklevel=2)
    lower, raise_, _ = ladder_ops(dim)
    matrix = expm(0.5 * r * (raise_ @ raise_ - lower @ lower))
    _check_columns(matrix, "squeeze")
    return matrix


@lru_cache(maxsize=None)
def _mixing_generator(dim: int):
    """Sparse a^dag b + b^dag a on the two-mode basis (mode a = first factor)."""
    lower = diags(np.sqrt(np.arange(1.0, dim)), 1, format="csc")
    raise_ = lower.conj().T
    return (sparse_kron(raise_, lower) + sparse_kron(lower, raise_)).tocsc()


def mz_unitary(phi: float, dim: int) -> np.ndarray:
    """Dense dim^2 x dim^2 interferometer unitary exp(-i(phi/2)(a^dag b + b^dag a)).

    The matrix exponential costs O(dim^6); this is for validation at small
    dimension.  Use `evolve` to act on a state without forming the matrix.
    """
    return expm(-0.5j * phi * _mixing_generator(dim).toarray())


def evolve(psi: TwoModeFockVector, phi: float) -> TwoModeFockVector:
    """Send a state through the interferometer at internal phase shift `phi`."""
    if phi == 0.0:
        amplitudes = psi.amplitudes.copy()
    else:
        amplitudes = expm_multiply(
            -0.5j * phi * _mixing_generator(psi.dim), psi.amplitudes)
    return TwoModeFockVector(amplitudes=amplitudes, cutoff=psi.cutoff)


def rotate_mode(psi: TwoModeFockVector, mode: str, theta: float) -> TwoModeFockVector:
    """Apply the phase rotation exp(i theta n) to one mode."""
    phases = np.exp(1j * theta * np.arange(psi.dim))
    grid = psi.amplitudes.reshape(psi.dim, psi.dim)
    if mode == "a":
        grid = grid * phases[:, None]
    elif mode == "b":
        grid = grid * phases[None, :]
    else:
        raise ParameterDomainError(f"mode must be 'a' or 'b', got {mode!r}")
    return TwoModeFockVector(amplitudes=grid.ravel(), cutoff=psi.cutoff)


def _mode_vector(spec: InputSpec, dim: int) -> np.ndarray:
    """Amplitudes of one beam: displacement applied after squeezing to vacuum."""
    vec = np.zeros(dim)
    vec[0] = 1.0
    if spec.r != 0.0:
        vec = squeeze_matrix(spec.r, dim) @ vec
    vec = vec.astype(complex)
    if complex(spec.alpha) != 0.0:
        vec = displacement_matrix(spec.alpha, dim) @ vec
    return vec


def build_input(spec_a: InputSpec, spec_b: InputSpec,
                cutoff: FockCutoff) -> TwoModeFockVector:
    """Product input state of the two beams on the truncated basis.

    Raises TruncationError when the basis is too small; because truncated
    exponentials are unitary the check compares each beam's energy against
    the spec rather than relying on the norm.
    """
    levels = np.arange(cutoff.dim)
    vectors = []
    for spec in (spec_a, spec_b):
        vec = _mode_vector(spec, cutoff.dim)
        built = float(levels @ (np.abs(vec) ** 2))
        target = spec.mean_photons
        if abs(built - target) > math.sqrt(cutoff.tail_tol) * (1.0 + target):
            raise TruncationError(
                f"beam energy {built:.6g} instead of {target:.6g} at dimension "
                f"{cutoff.dim}; basis too small")
        vectors.append(vec)
    return TwoModeFockVector(amplitudes=np.kron(vectors[0], vectors[1]), cutoff=cutoff)


def twin_beam_reference(r: float, cutoff) -> TwoModeFockVector:
    """Perfectly photon-correlated two-mode state sum_k tanh^k(r) |k,k> / cosh(r).

    `cutoff` may be a FockCutoff or a bare dimension.  The truncated norm is
    1 - tanh^{2 dim}(r); a heavier tail raises TruncationError via the
    vector invariant.
    """
    if not isinstance(cutoff, FockCutoff):
        cutoff = FockCutoff(dim=int(cutoff))
    amplitudes = np.zeros(cutoff.dim ** 2, dtype=complex)
    t = math.tanh(r)
    amplitudes[:: cutoff.dim + 1] = t ** np.arange(cutoff.dim) / math.cosh(r)
    return TwoModeFockVector(amplitudes=amplitudes, cutoff=cutoff)


def reduced_density(psi: TwoModeFockVector, mode: str) -> ModeDensity:
    """Partial trace over the other mode."""
    grid = psi.amplitudes.reshape(psi.dim, psi.dim)
    if mode == "a":
        rho = grid @ grid.conj().T
    elif mode == "b":
        rho = grid.T @ grid.conj()
    else:
        raise ParameterDomainError(f"mode must be 'a' or 'b', got {mode!r}")
    return ModeDensity(matrix=rho)


def von_neumann_entropy(rho: ModeDensity) -> float:
    """-sum(p ln p) over the spectrum, natural log.

    The matrix is symmetrized first; eigenvalues below 1e-14 contribute
    nothing and the surviving spectrum is renormalized so truncation deficit
    does not masquerade as mixedness.
    """
    eigs = np.linalg.eigvalsh((rho.matrix + rho.matrix.conj().T) / 2.0)
    if eigs.min() < -1e-10:
        raise UnphysicalStateError(f"density matrix has eigenvalue {eigs.min():.3e}")
    eigs = eigs[eigs > 1e-14]
    if eigs.size == 0:
        return 0.0
    eigs = eigs / eigs.sum()
    return float(-(eigs * np.log(eigs)).sum())


def photon_product_expectation(psi: TwoModeFockVector) -> float:
    """<n_a n_b>, the coincidence counting rate, summed in the number basis."""
    levels = np.arange(psi.dim, dtype=float)
    return float(levels @ psi.joint_probabilities() @ levels)


def squared_difference_expectation(psi: TwoModeFockVector) -> float:
    """<(n_a - n_b)^2>, the squared difference photocurrent."""
    levels = np.arange(psi.dim, dtype=float)
    probs = psi.joint_probabilities()
    diff2 = (levels[:, None] - levels[None, :]) ** 2
    return float((diff2 * probs).sum())


def entanglement_degree_fock(spec_a: InputSpec, spec_b: InputSpec, phi: float,
                             cutoff: FockCutoff | None = None) -> float:
    """Normalized excess entropy computed entirely in the number basis.

    Uses the same denominator convention as the Gaussian engine: thermal
    entropies at the actual output intensities.  With cutoff=None an
    adequate dimension is selected automatically.
    """
    if cutoff is None:
        cutoff = auto_cutoff(spec_a, spec_b, phi)
    out = evolve(build_input(spec_a, spec_b, cutoff), phi)
    numerator = 0.0
    denominator = 0.0
    for mode in ("a", "b"):
        rho = reduced_density(out, mode)
        numerator += von_neumann_entropy(rho)
        denominator += thermal_entropy(rho.mean_photons())
    if denominator < 1e-12:
        return 0.0
    return min(max(numerator / denominator, 0.0), 1.0)


def _mode_tail(spec: InputSpec, dim: int) -> float:
    """Probability the beam puts above the top level, probed in a basis twice as large."""
    probe = _mode_vector(spec, min(2 * dim, 2 * DIM_CAP))
    return float((np.abs(probe[dim:]) ** 2).sum())


def auto_cutoff(spec_a: InputSpec, spec_b: InputSpec, phi: float,
                tail_tol: float = DEFAULT_TAIL_TOL,
                dim_cap: int = DIM_CAP) -> FockCutoff:
    """Smallest dimension in the doubling sequence that bounds truncation loss.

    A dimension is adequate when (i) each beam's probe-estimated tail mass
    is at most tail_tol, (ii) build_input accepts it, and (iii) after
    evolution each mode holds at most tail_tol of probability in its top
    two levels (evolution migrates weight upward, so the input tail alone
    is not enough).
    """
    if not 0.0 < tail_tol <= 1e-4:
        raise ParameterDomainError(
            f"tail tolerance must lie in (0, 1e-4], got {tail_tol}")
    trace = []
    for dim in _DOUBLING:
        if dim > dim_cap:
            break
        # candidates that are knowingly too small would spam size warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            input_tail = max(_mode_tail(spec_a, dim), _mode_tail(spec_b, dim))
            trace.append((dim, input_tail))
            if input_tail > tail_tol:
                continue
            cutoff = FockCutoff(dim=dim, tail_tol=tail_tol)
            try:
                out = evolve(build_input(spec_a, spec_b, cutoff), phi)
            except TruncationError:
                continue
        band = max(dim - 2, 1)
        top = max(out.mode_occupations("a")[band:].sum(),
                  out.mode_occupations("b")[band:].sum())
        if top <= tail_tol:
            return cutoff
    raise TruncationError(
        f"no adequate dimension up to {dim_cap} at tail tolerance {tail_tol:.1e}; "
        f"(dim, input tail) trace: {trace}")


def fidelity(psi_1: TwoModeFockVector, psi_2: TwoModeFockVector) -> float:
    """|<psi_1|psi_2>|^2."""
    return float(abs(np.vdot(psi_1.amplitudes, psi_2.amplitudes)) ** 2)
