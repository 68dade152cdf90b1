"""Mach-Zehnder interferometer fed by squeezed-coherent light.

Two independent engines compute the same physics: `gaussian` propagates
means and covariances symplectically and evaluates reduced-state entropies
in closed form; `fock` brute-forces everything on a truncated number basis
so the analytic results can be cross-checked.  `observables` adds the
fourth-order detector signals and their fringe visibility, and `cli` wraps
it all in a CSV-emitting command line tool.
"""

from .errors import ParameterDomainError, TruncationError, UnphysicalStateError
from .gaussian import (
    SYMPLECTIC_FORM,
    VACUUM_VARIANCE,
    InputSpec,
    ReducedModeState,
    SymplecticMap,
    TwoModeGaussianState,
    bs_map,
    entanglement_degree,
    entanglement_degree_asymptotic,
    make_input_state,
    mz_map,
    reduce_mode,
    rotation_map,
    thermal_entropy,
    thermal_entropy_inverse,
    thermal_photons,
    thermal_photons_closed_form,
)
from .fock import (
    DEFAULT_TAIL_TOL,
    DIM_CAP,
    FockCutoff,
    ModeDensity,
    TwoModeFockVector,
    auto_cutoff,
    build_input,
    displacement_matrix,
    entanglement_degree_fock,
    evolve,
    fidelity,
    ladder_ops,
    mz_unitary,
    photon_product_expectation,
    reduced_density,
    rotate_mode,
    squared_difference_expectation,
    squeeze_matrix,
    twin_beam_reference,
    von_neumann_entropy,
)
from .observables import (
    PhiScan,
    VisibilityResult,
    coincidence_rate,
    coincidence_visibility,
    difference_visibility,
    difference_visibility_asymptotic,
    mean_photon_product,
    mean_photon_square,
    mean_squared_difference,
    squared_difference,
    visibility,
)

__version__ = "0.1.0"
