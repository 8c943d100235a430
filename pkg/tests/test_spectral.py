import numpy as np
import pytest

import kimdiff as kd
from kimdiff.spectral import _phase_values

from conftest import neutral_mode_exact


def test_neutral_eigenvalues(neutral):
    basis = kd.solve_eigenproblem(neutral, 12, 4096)
    j = np.arange(12)
    exact = (j + 1) * (j + 2)
    assert np.max(np.abs(basis.eigenvalues / exact - 1)) <= 1e-6


def test_positive_spectrum_random_models():
    rng = np.random.default_rng(3)
    for _ in range(4):
        psi = (0.5 + rng.uniform(0, 1), rng.uniform(-0.2, 0.2))
        pi = tuple(rng.uniform(-1.5, 1.5, rng.integers(1, 4)))
        m = kd.CoefficientModel(psi, pi)
        basis = kd.solve_eigenproblem(m, 8, 512)
        assert basis.eigenvalues[0] > 0
        assert np.all(np.diff(basis.eigenvalues) > 0)


def test_oscillation_counts(neutral_basis):
    phi = neutral_basis.eigenfunctions
    for j in range(neutral_basis.n_modes):
        crossings = int(np.sum(phi[:-1, j] * phi[1:, j] < 0))
        assert crossings == j


def test_weighted_orthonormality(neutral_basis):
    phi = neutral_basis.eigenfunctions
    w = neutral_basis.weight_values
    gram = neutral_basis.spacing * (phi * w[:, None]).T @ phi
    assert np.max(np.abs(gram - np.eye(neutral_basis.n_modes))) <= 1e-6


def test_sign_convention(neutral_basis):
    assert np.all(neutral_basis.eigenfunctions[0, :] > 0)
    assert np.all(neutral_basis.density_modes[0, :] > 0)


def test_density_modes_match_closed_form(neutral):
    basis = kd.build_basis(neutral, 6, 4096)
    grid = basis.closed_grid
    for j in range(6):
        exact = neutral_mode_exact(j, grid)
        assert np.max(np.abs(basis.density_modes[:, j] - exact)) <= 2e-4 * np.max(
            np.abs(exact)
        )


def test_flux_identity(neutral):
    basis = kd.build_basis(neutral, 9, 4096)
    assert np.max(kd.flux_identity_residuals(neutral, basis)) <= 1e-4


def test_antisymmetric_mode_has_zero_mass(neutral_basis):
    q1 = neutral_basis.density_modes[:, 1]
    assert abs(neutral_basis.mode_masses[1]) <= 1e-6
    assert abs(q1[0] + q1[-1]) <= 1e-3 * abs(q1[0])


def test_leading_mode_identity(neutral_basis):
    q0 = neutral_basis.density_modes[:, 0]
    lhs = neutral_basis.mode_masses[0] * neutral_basis.eigenvalues[0]
    assert lhs == pytest.approx(q0[0] + q0[-1], rel=1e-5)


def test_growth_constant(neutral):
    basis = kd.solve_eigenproblem(neutral, 32, 2048)
    k_est, residuals = kd.eigenvalue_growth(basis)
    assert abs(k_est - 1.0) <= 0.1
    assert abs(residuals[-1]) < abs(residuals[0])
    assert np.max(np.abs(residuals)) < 0.2


def test_growth_needs_modes(neutral_basis):
    small = kd.solve_eigenproblem(kd.make_kimura(0, 0), 8, 512)
    with pytest.raises(ValueError):
        kd.eigenvalue_growth(small)


def test_growth_matches_phase_prediction(neutral):
    # independent prediction: K = pi^2 / (total Liouville-Green phase)^2
    basis = kd.solve_eigenproblem(neutral, 32, 2048)
    k_est, _ = kd.eigenvalue_growth(basis)
    # neutral phase integral over (0, 1) is pi
    assert abs(k_est - np.pi**2 / np.pi**2) <= 0.1


def test_bessel_comparison_decreases(neutral):
    basis = kd.build_basis(neutral, 20, 8192)
    errs = [kd.bessel_comparison(neutral, basis, j) for j in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]


def test_bessel_comparison_guards(neutral_basis):
    with pytest.raises(ValueError):
        kd.bessel_comparison(kd.make_kimura(0, 0), neutral_basis, 2)
    with pytest.raises(ValueError):
        kd.bessel_comparison(kd.make_kimura(0, 0), neutral_basis, 99)


def test_phase_values_neutral(neutral, neutral_basis):
    s_vals = _phase_values(neutral, neutral_basis)
    exact = 2 * np.arcsin(np.sqrt(neutral_basis.interior_grid))
    assert np.max(np.abs(s_vals - exact)) <= 1e-10


def test_eigenfunction_sup_bounded(neutral_basis):
    sup = np.max(np.abs(neutral_basis.eigenfunctions), axis=0)
    assert np.max(sup) < 1.0


def test_density_mode_sup_scaling(neutral_basis):
    scaled = (
        np.max(np.abs(neutral_basis.density_modes), axis=0)
        * neutral_basis.eigenvalues**-0.75
    )
    assert np.max(scaled) / np.min(scaled) < 1.2


def test_grid_convergence_is_second_order(selection):
    lams = [
        kd.spectral._solve_grid(selection, n, 6, want_vectors=False)[3]
        for n in (512, 1025, 2051)
    ]
    ratio = (lams[0] - lams[1]) / (lams[1] - lams[2])
    assert np.all((ratio > 3.0) & (ratio < 5.0))


def test_richardson_consistency(selection):
    coarse = kd.solve_eigenproblem(selection, 6, 1024).eigenvalues
    fine = kd.solve_eigenproblem(selection, 6, 4096).eigenvalues
    assert np.max(np.abs(coarse / fine - 1)) <= 1e-7


def test_resolution_guards(neutral):
    with pytest.raises(ValueError):
        kd.solve_eigenproblem(neutral, 4, 32)
    with pytest.raises(ValueError):
        kd.solve_eigenproblem(neutral, 100, 512)


def test_transform_requires_solve_products(neutral):
    basis = kd.solve_eigenproblem(neutral, 4, 256)
    assert basis.density_modes is None
    with pytest.raises(ValueError):
        kd.flux_identity_residuals(neutral, basis)
    full = kd.transform_eigenfunctions(neutral, basis)
    assert full.density_modes.shape == (258, 4)
    assert len(full.mode_masses) == 4
