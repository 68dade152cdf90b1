"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL line
per criterion.  Everything asserted here is checked against independent
constructions (series sums, sparse operator algebra, probe bases), never
against the code path under test.
"""

import math
import time

import numpy as np
import scipy.sparse as sp

from mzvis import (
    SYMPLECTIC_FORM,
    InputSpec,
    auto_cutoff,
    build_input,
    coincidence_rate,
    coincidence_visibility,
    difference_visibility,
    difference_visibility_asymptotic,
    entanglement_degree,
    entanglement_degree_asymptotic,
    entanglement_degree_fock,
    evolve,
    make_input_state,
    mz_map,
    photon_product_expectation,
    reduce_mode,
    reduced_density,
    squared_difference,
    squared_difference_expectation,
    thermal_photons,
    von_neumann_entropy,
)
from mzvis.cli import main as cli_main
from mzvis.fock import FockCutoff

INTENSITY_GRID = np.geomspace(0.1, 50.0, 40)
FRACTION_SET = (0.2, 0.4, 0.6, 0.8, 1.0)


def report(number, ok, detail):
    print(f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {number}: {detail}"


def random_spec(rng, n_max=2.0):
    return InputSpec.from_energy(rng.uniform(0.0, n_max), rng.uniform(0.0, 1.0),
                                 phase=rng.uniform(0.0, 2.0 * math.pi))


def test_criterion_01_zero_entanglement_at_zero_phase():
    rng = np.random.default_rng(20260810)
    start = time.monotonic()
    worst_gauss = worst_fock = 0.0
    for _ in range(50):
        spec_a, spec_b = random_spec(rng), random_spec(rng)
        worst_gauss = max(worst_gauss, entanglement_degree(spec_a, spec_b, 0.0))
        worst_fock = max(worst_fock,
                         entanglement_degree_fock(spec_a, spec_b, 0.0))
    elapsed = time.monotonic() - start
    ok = worst_gauss <= 1e-10 and worst_fock <= 1e-9 and elapsed < 10.0
    report(1, ok, f"zero phase: analytic<={worst_gauss:.2e} "
                  f"fock<={worst_fock:.2e} in {elapsed:.1f}s")


def test_criterion_02_maximal_entanglement_for_squeezed_vacuum():
    worst_gauss = max(abs(entanglement_degree(InputSpec.from_energy(n, 1.0),
                                              InputSpec.from_energy(n, 1.0),
                                              math.pi / 2) - 1.0)
                      for n in (0.5, 1.0, 3.0, 10.0))
    worst_fock = 0.0
    for n in (0.5, 1.0, 3.0):
        spec = InputSpec.from_energy(n, 1.0)
        worst_fock = max(worst_fock,
                         abs(entanglement_degree_fock(spec, spec, math.pi / 2)
                             - 1.0))
    ok = worst_gauss <= 1e-10 and worst_fock <= 2e-3
    report(2, ok, f"full squeezing: analytic dev {worst_gauss:.2e}, "
                  f"fock dev {worst_fock:.2e}")


def test_criterion_03_twin_beam_photon_number():
    worst_half = worst_zero = 0.0
    for r in np.linspace(0.0, 2.0, 21):
        for alpha in (0.0, 0.7 + 0.2j):
            spec = InputSpec(alpha=alpha, r=float(r))
            state = make_input_state(spec, spec)
            n_half = thermal_photons(reduce_mode(
                mz_map(math.pi / 2).apply(state), "a"))
            n_zero = thermal_photons(reduce_mode(mz_map(0.0).apply(state), "a"))
            worst_half = max(worst_half, abs(n_half - math.sinh(r) ** 2))
            worst_zero = max(worst_zero, n_zero)
    ok = worst_half <= 1e-12 and worst_zero <= 1e-12
    report(3, ok, f"occupation at half mixing dev {worst_half:.2e}, "
                  f"at zero phase {worst_zero:.2e}")


def test_criterion_04_coherent_inputs_stay_factorized():
    rng = np.random.default_rng(4)
    phis = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
    worst_eps, worst_impurity = 0.0, 0.0
    cutoff = FockCutoff(dim=24, tail_tol=1e-4)
    for _ in range(3):
        alpha_a = complex(rng.normal(0, 0.7), rng.normal(0, 0.7))
        alpha_b = complex(rng.normal(0, 0.7), rng.normal(0, 0.7))
        spec_a, spec_b = InputSpec(alpha=alpha_a), InputSpec(alpha=alpha_b)
        psi = build_input(spec_a, spec_b, cutoff)
        norm2 = (1.0 - psi.norm_deficit) ** 2
        for phi in phis:
            worst_eps = max(worst_eps,
                            entanglement_degree(spec_a, spec_b, float(phi)))
            out = evolve(psi, float(phi))
            for mode in ("a", "b"):
                purity = reduced_density(out, mode).purity() / norm2
                worst_impurity = max(worst_impurity, 1.0 - purity)
    ok = worst_eps <= 1e-10 and worst_impurity <= 1e-8
    report(4, ok, f"coherent inputs: entanglement<={worst_eps:.2e}, "
                  f"reduced impurity<={worst_impurity:.2e}")


def test_criterion_05_oracle_equivalence_grid():
    start = time.monotonic()
    worst = {"eps": 0.0, "K": 0.0, "H": 0.0}
    max_dim = 0
    ok = True
    for n in (0.5, 1.0, 3.0):
        for gamma in (0.0, 0.5, 1.0):
            spec = InputSpec.from_energy(n, gamma)
            for phi in (0.0, math.pi / 8, math.pi / 4, math.pi / 2):
                cutoff = auto_cutoff(spec, spec, phi)
                max_dim = max(max_dim, cutoff.dim)
                out = evolve(build_input(spec, spec, cutoff), phi)
                k_g = coincidence_rate(spec, spec, phi)
                h_g = squared_difference(spec, spec, phi)
                d_eps = abs(entanglement_degree(spec, spec, phi)
                            - entanglement_degree_fock(spec, spec, phi, cutoff))
                d_k = abs(k_g - photon_product_expectation(out))
                d_h = abs(h_g - squared_difference_expectation(out))
                worst["eps"] = max(worst["eps"], d_eps)
                worst["K"] = max(worst["K"], d_k)
                worst["H"] = max(worst["H"], d_h)
                ok = ok and d_eps <= 2e-3 and d_k <= 1e-3 * (1 + k_g) \
                    and d_h <= 1e-3 * (1 + h_g)
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 300.0
    report(5, ok, f"36-point grid: d_eps<={worst['eps']:.2e} "
                  f"d_K<={worst['K']:.2e} d_H<={worst['H']:.2e} "
                  f"dim<={max_dim} in {elapsed:.1f}s")


def _lifted_ladders(dim):
    lower = sp.diags(np.sqrt(np.arange(1.0, dim)), 1, format="csc")
    eye = sp.identity(dim, format="csc")
    return sp.kron(lower, eye, format="csc"), sp.kron(eye, lower, format="csc")


def _coincidence_expansion(phi, a, b):
    """Conjugated n_a n_b written in input-field operators."""
    s, c = math.sin(phi / 2.0), math.cos(phi / 2.0)
    ad, bd = a.conj().T, b.conj().T
    n_a, n_b = ad @ a, bd @ b
    a2, b2, ad2, bd2 = a @ a, b @ b, ad @ ad, bd @ bd
    return (s * s * c * c * (ad2 @ a2 + bd2 @ b2 + ad2 @ b2 + bd2 @ a2)
            + (s * s - c * c) ** 2 * (n_a @ n_b)
            + 1j * s * c ** 3 * (a @ bd2 @ b + ad2 @ a @ b - ad @ bd @ b2
                                 - ad @ a2 @ bd)
            + 1j * s ** 3 * c * (ad @ a2 @ bd + ad @ bd @ b2 - ad2 @ a @ b
                                 - a @ bd2 @ b))


def _difference_expansion(phi, a, b, corrected):
    """Conjugated (n_a - n_b)^2 in input-field operators.

    The quadratic-mixing bracket needs a -4 n_a n_b term; without it the
    operator acquires negative expectations on a manifestly nonnegative
    observable.  `corrected=False` reproduces the textbook-shaped form so
    its defect can be pinned exactly.
    """
    s, c = math.sin(phi / 2.0), math.cos(phi / 2.0)
    ad, bd = a.conj().T, b.conj().T
    n_a, n_b = ad @ a, bd @ b
    a2, b2, ad2, bd2 = a @ a, b @ b, ad @ ad, bd @ bd
    bracket = ad2 @ b2 + bd2 @ a2 - n_a - n_b
    if corrected:
        bracket = bracket - 4.0 * (n_a @ n_b)
    return (-2.0 * _coincidence_expansion(phi, a, b)
            + (s ** 4 + c ** 4) * (n_a @ n_a + n_b @ n_b)
            - 2.0 * s * s * c * c * bracket
            + 2j * s * c ** 3 * (ad @ a2 @ bd - ad2 @ a @ b + ad @ bd @ b2
                                 - a @ bd2 @ b)
            + 2j * s ** 3 * c * (a @ bd2 @ b - ad @ bd @ b2 + ad2 @ a @ b
                                 - ad @ a2 @ bd))


def test_criterion_06_heisenberg_consistency():
    dim = 40
    a, b = _lifted_ladders(dim)
    n_ab = (a.conj().T @ a) @ (b.conj().T @ b)
    rng = np.random.default_rng(6)
    cutoff = FockCutoff(dim=dim, tail_tol=1e-4)
    worst_k = worst_h = worst_defect = 0.0
    for _ in range(10):
        spec_a = InputSpec.from_energy(rng.uniform(0.05, 0.3),
                                       rng.uniform(0.0, 1.0),
                                       phase=rng.uniform(0.0, 2.0 * math.pi))
        spec_b = InputSpec.from_energy(rng.uniform(0.05, 0.3),
                                       rng.uniform(0.0, 1.0),
                                       phase=rng.uniform(0.0, 2.0 * math.pi))
        phi = rng.uniform(0.0, 2.0 * math.pi)
        psi = build_input(spec_a, spec_b, cutoff)
        out = evolve(psi, phi)
        vec = psi.amplitudes

        k_expanded = np.vdot(vec, _coincidence_expansion(phi, a, b) @ vec).real
        h_expanded = np.vdot(
            vec, _difference_expansion(phi, a, b, corrected=True) @ vec).real
        worst_k = max(worst_k,
                      abs(k_expanded - photon_product_expectation(out)))
        worst_h = max(worst_h,
                      abs(h_expanded - squared_difference_expectation(out)))

        # the uncorrected bracket falls short by exactly 8 s^2 c^2 <n_a n_b>
        h_plain = np.vdot(
            vec, _difference_expansion(phi, a, b, corrected=False) @ vec).real
        s, c = math.sin(phi / 2.0), math.cos(phi / 2.0)
        defect = 8.0 * s * s * c * c * np.vdot(vec, n_ab @ vec).real
        worst_defect = max(worst_defect,
                           abs((h_expanded - h_plain) - defect))
    ok = worst_k <= 1e-8 and worst_h <= 1e-8 and worst_defect <= 1e-8
    report(6, ok, f"expanded-operator dev: K {worst_k:.2e}, H {worst_h:.2e}, "
                  f"bracket defect pinned to {worst_defect:.2e}")


def test_criterion_07_difference_visibility_unity_at_full_squeezing():
    worst_vis = worst_min = 0.0
    for n in INTENSITY_GRID:
        spec = InputSpec.from_energy(float(n), 1.0)
        worst_vis = max(worst_vis,
                        abs(difference_visibility(spec, spec).value - 1.0))
        worst_min = max(worst_min,
                        abs(squared_difference(spec, spec, math.pi / 2)))
    ok = worst_vis <= 1e-6 and worst_min <= 1e-8
    report(7, ok, f"difference visibility dev<={worst_vis:.2e}, "
                  f"signal at half mixing<={worst_min:.2e}")


def test_criterion_08_coincidence_visibility_saturates_low():
    values = [coincidence_visibility(InputSpec.from_energy(float(n), 1.0),
                                     InputSpec.from_energy(float(n), 1.0)).value
              for n in INTENSITY_GRID]
    decreasing = all(later <= earlier + 1e-12
                     for earlier, later in zip(values, values[1:]))
    below_half = all(v < 0.5 for n, v in zip(INTENSITY_GRID, values) if n >= 5.0)
    ok = decreasing and below_half
    report(8, ok, f"coincidence visibility decreasing={decreasing}, "
                  f"max at n>=5 is "
                  f"{max(v for n, v in zip(INTENSITY_GRID, values) if n >= 5.0):.4f}")


def test_criterion_09_difference_never_loses_above_unit_intensity():
    margin = math.inf
    for n in INTENSITY_GRID:
        if n < 1.0:
            continue
        for gamma in FRACTION_SET:
            spec = InputSpec.from_energy(float(n), gamma)
            v_h = difference_visibility(spec, spec).value
            v_k = coincidence_visibility(spec, spec).value
            margin = min(margin, v_h - v_k)
    ok = margin >= -1e-12
    report(9, ok, f"min(V_H - V_K) over the n>=1 grid = {margin:.4f}")


def test_criterion_10_one_coherent_beam_caps_entanglement():
    coherent = InputSpec.from_energy(3.0, 0.0)
    top = max(entanglement_degree(InputSpec.from_energy(3.0, float(g)),
                                  coherent, math.pi / 2)
              for g in np.linspace(0.0, 1.0, 41))
    ok = top < 0.5
    report(10, ok, f"max entanglement with one coherent beam = {top:.5f}")


def test_criterion_11_asymptotics():
    lines = []
    ok = True
    for gamma in (0.3, 0.5, 0.8):
        spec = InputSpec.from_energy(1000.0, gamma)
        exact = entanglement_degree(spec, spec, math.pi / 2)
        approx = entanglement_degree_asymptotic(1000.0, gamma)
        dev = abs(exact - approx)
        ok = ok and dev <= 0.02
        lines.append(f"gamma={gamma}: |{exact:.5f}-{approx:.5f}|={dev:.4f}")

    spec = InputSpec.from_energy(100.0, 0.5)
    v_h = difference_visibility(spec, spec).value
    reference = difference_visibility_asymptotic(100.0, 0.5)
    rel = abs(v_h - reference) / reference
    ok_vis = rel <= 0.20
    lines.append(f"V_H(100, 0.5)={v_h:.5f} vs {reference:.5f} rel={rel:.3f}")
    report(11, ok and ok_vis, "; ".join(lines))


def test_criterion_12_property_suites(tmp_path):
    # symplectic identity across the phase grid
    sympl = max(np.abs(mz_map(float(p)).matrix @ SYMPLECTIC_FORM
                       @ mz_map(float(p)).matrix.T - SYMPLECTIC_FORM).max()
                for p in np.linspace(0.0, 2.0 * math.pi, 64))

    # purity, energy conservation, and entropy symmetry
    rng = np.random.default_rng(12)
    purity_dev = energy_dev = entropy_dev = 0.0
    for _ in range(6):
        spec_a, spec_b = random_spec(rng), random_spec(rng)
        state = make_input_state(spec_a, spec_b)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        out = mz_map(phi).apply(state)
        purity_dev = max(purity_dev,
                         np.abs(out.symplectic_eigenvalues() - 0.25).max())
        energy_dev = max(energy_dev,
                         abs(out.total_photons() - state.total_photons()))
    for seed in (1, 2):
        rng_f = np.random.default_rng(seed)
        spec_a = InputSpec.from_energy(rng_f.uniform(0.2, 1.0),
                                       rng_f.uniform(0.0, 1.0))
        spec_b = InputSpec.from_energy(rng_f.uniform(0.2, 1.0),
                                       rng_f.uniform(0.0, 1.0))
        psi = build_input(spec_a, spec_b, FockCutoff(dim=40, tail_tol=1e-4))
        out = evolve(psi, rng_f.uniform(0.0, 2.0 * math.pi))
        entropy_dev = max(entropy_dev,
                          abs(von_neumann_entropy(reduced_density(out, "a"))
                              - von_neumann_entropy(reduced_density(out, "b"))))

    # deterministic CSV
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    for path in (first, second):
        assert cli_main(["--command", "fig2a", "--grid", "16",
                         "--output", str(path)]) == 0
    identical = first.read_bytes() == second.read_bytes()

    ok = (sympl <= 1e-12 and purity_dev <= 1e-10 and energy_dev <= 1e-10
          and entropy_dev <= 5e-3 and identical)
    report(12, ok, f"symplectic<={sympl:.1e} purity<={purity_dev:.1e} "
                   f"energy<={energy_dev:.1e} entropy sym<={entropy_dev:.1e} "
                   f"csv identical={identical}")
