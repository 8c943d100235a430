"""Singular Sturm-Liouville eigenproblem behind the forward equation.

Discretizes  -phi'' + V phi = lambda * w * phi  with homogeneous Dirichlet
conditions on interior points only (the weight w is singular at the
endpoints; the problem is limit-point there, so interior collocation is the
right realization).  The generalized symmetric-definite problem reduces to a
symmetric tridiagonal one because the mass matrix is diagonal.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import j1

from ._quadrature import adaptive_gl, segment_integrals

# Lagrange weights for extrapolating uniform-grid samples at h, 2h, ... to 0.
_EXTRAP3 = np.array([3.0, -3.0, 1.0])
_EXTRAP4 = np.array([4.0, -6.0, 4.0, -1.0])
_EXTRAP_FLAG_TOL = 1e-3


@dataclass
class SpectralBasis:
    """Eigenpairs of the weighted eigenproblem on a uniform interior grid.

    interior_grid: x_i = i h, h = 1/(n+1), i = 1..n.
    eigenvalues: lowest modes, ascending, Richardson-refined.
    eigenfunctions: (n, m) samples, orthonormal under the trapezoidal
        weight-weighted inner product, signed so the slope at 0 is positive.
    weight_values, xi_integral_values: the weight and the running integral of
        xi at the interior points (cached for the transforms).
    density_modes: (n+2, m) transformed eigenfunctions on the closed grid,
        endpoint values filled by polynomial extrapolation; None until
        transform_eigenfunctions runs.
    mode_masses: integrals of the density modes over [0, 1]; None until
        transform_eigenfunctions runs.
    """

    interior_grid: np.ndarray
    spacing: float
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    weight_values: np.ndarray
    xi_integral_values: np.ndarray
    density_modes: np.ndarray = None
    mode_masses: np.ndarray = None

    @property
    def n_modes(self):
        return len(self.eigenvalues)

    @property
    def closed_grid(self):
        return np.concatenate(([0.0], self.interior_grid, [1.0]))


def _solve_grid(model, n_grid, n_modes, want_vectors=True):
    h = 1.0 / (n_grid + 1)
    x = h * np.arange(1, n_grid + 1)
    w = model.weight(x)
    v = model.potential(x)
    sq = np.sqrt(w)
    diag = (2.0 / h**2 + v) / w
    off = (-1.0 / h**2) / (sq[:-1] * sq[1:])
    try:
        if want_vectors:
            vals, vecs = eigh_tridiagonal(
                diag, off, select="i", select_range=(0, n_modes - 1)
            )
        else:
            vals = eigh_tridiagonal(
                diag, off, select="i", select_range=(0, n_modes - 1),
                eigvals_only=True,
            )
            vecs = None
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"tridiagonal eigensolver failed at n_grid={n_grid}: {exc}")
    if vecs is None:
        return x, h, w, vals, None
    phi = vecs / sq[:, None]
    phi /= np.sqrt(h) * np.linalg.norm(vecs, axis=0)[None, :]
    signs = np.sign(phi[0, :])
    signs[signs == 0.0] = 1.0
    phi *= signs[None, :]
    return x, h, w, vals, phi


def solve_eigenproblem(model, n_modes, n_grid):
    """Lowest n_modes eigenpairs on an n_grid-point interior grid.

    Second-order centered differences give the stiffness part; the singular
    weight lands on the diagonal mass.  Eigenvalues take one grid-doubling
    Richardson step; eigenvectors come from the requested grid, where the
    discrete weight-orthonormality is exact up to solver roundoff.
    """
    n_modes = int(n_modes)
    n_grid = int(n_grid)
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    if n_modes < 1 or n_modes > n_grid // 8:
        raise ValueError(
            f"n_modes must lie in [1, n_grid/8]; got {n_modes} at n_grid={n_grid}"
        )
    x, h, w, vals_c, phi = _solve_grid(model, n_grid, n_modes)
    _, _, _, vals_f, _ = _solve_grid(model, 2 * n_grid + 1, n_modes, want_vectors=False)
    lam = (4.0 * vals_f - vals_c) / 3.0
    if lam[0] <= 0.0:
        raise RuntimeError(
            f"computed smallest eigenvalue {lam[0]:.3e} is not positive; the "
            "operator is positive-definite, so this signals a discretization failure"
        )
    return SpectralBasis(
        interior_grid=x,
        spacing=h,
        eigenvalues=lam,
        eigenfunctions=phi,
        weight_values=w,
        xi_integral_values=model.xi_integral(x),
    )


def transform_eigenfunctions(model, basis):
    """Fill density_modes and mode_masses.

    The density-space mode is exp(half integral of xi) * weight * phi at
    interior points.  Endpoint values come from 3-point polynomial
    extrapolation (the eigenfunctions vanish linearly, so the transformed
    modes have finite endpoint limits); a 4-point extrapolant cross-checks
    stability.  Mode masses are trapezoids over the closed grid.
    """
    q_int = (
        np.exp(0.5 * basis.xi_integral_values)[:, None]
        * basis.weight_values[:, None]
        * basis.eigenfunctions
    )
    left3 = _EXTRAP3 @ q_int[:3, :]
    left4 = _EXTRAP4 @ q_int[:4, :]
    right3 = _EXTRAP3 @ q_int[-1:-4:-1, :]
    right4 = _EXTRAP4 @ q_int[-1:-5:-1, :]
    scale = np.max(np.abs(q_int[:4, :]), axis=0)
    bad_l = np.abs(left3 - left4) > _EXTRAP_FLAG_TOL * np.maximum(scale, 1e-300)
    scale_r = np.max(np.abs(q_int[-4:, :]), axis=0)
    bad_r = np.abs(right3 - right4) > _EXTRAP_FLAG_TOL * np.maximum(scale_r, 1e-300)
    unstable = np.nonzero(bad_l | bad_r)[0]
    if unstable.size:
        warnings.warn(
            f"endpoint extrapolation is unstable for {unstable.size} density "
            f"modes (lowest affected: {unstable[0]}); their 3- and 4-point "
            "extrapolants disagree beyond 1e-3 relative, so endpoint values "
            "carry that uncertainty; increase n_grid to resolve them",
            stacklevel=2,
        )
    q = np.vstack([left3, q_int, right3])
    masses = np.trapezoid(q, np.concatenate(([0.0], basis.interior_grid, [1.0])), axis=0)
    return replace(basis, density_modes=q, mode_masses=masses)


def build_basis(model, n_modes, n_grid):
    """solve_eigenproblem followed by transform_eigenfunctions."""
    return transform_eigenfunctions(model, solve_eigenproblem(model, n_modes, n_grid))


def flux_identity_residuals(model, basis):
    """Relative defect of the integrated-eigenmode identity.

    Integrating the density-mode equation over [0, 1] ties each mode mass to
    the boundary flux:  mass * lambda = Psi(0) q(0) + Psi(1) q(1).  Residuals
    are normalized by Psi(0)|q(0)| + Psi(1)|q(1)| so antisymmetric modes
    (where both sides nearly vanish) stay meaningful.
    """
    if basis.density_modes is None:
        raise ValueError("transform_eigenfunctions must run first")
    psi0 = model.psi_at(0.0)
    psi1 = model.psi_at(1.0)
    q0 = basis.density_modes[0, :]
    q1 = basis.density_modes[-1, :]
    lhs = basis.mode_masses * basis.eigenvalues
    rhs = psi0 * q0 + psi1 * q1
    scale = psi0 * np.abs(q0) + psi1 * np.abs(q1)
    return np.abs(lhs - rhs) / scale


def eigenvalue_growth(basis):
    """Quadratic-growth constant of the spectrum.

    Fits eigenvalue against mode-index squared over the top half of the
    resolved modes; returns the slope and the per-mode residuals
    lambda_j / j^2 - K for the fitted modes.
    """
    m = basis.n_modes
    if m < 16:
        raise ValueError("at least 16 modes are needed for a growth fit")
    j = np.arange(m // 2, m, dtype=float)
    lam = basis.eigenvalues[m // 2:]
    k_est = float(np.polyfit(j**2, lam, 1)[0])
    residuals = lam / j**2 - k_est
    return k_est, residuals


def _phase_values(model, basis):
    """Liouville-Green phase S(x) = integral_0^x sqrt(weight) at interior points.

    The first gap [0, x_1] is regularized by substituting x = u^2, which turns
    the inverse-square-root endpoint singularity into a smooth integrand.
    """
    x = basis.interior_grid

    def regular(u):
        return 2.0 / np.sqrt(model.psi_at(u**2) * (1.0 - u**2))

    first = adaptive_gl(regular, 0.0, float(np.sqrt(x[0])), 1e-13)
    gaps = segment_integrals(lambda s: np.sqrt(model.weight(s)), x, 1e-12)
    return first + np.concatenate(([0.0], np.cumsum(gaps)))


def bessel_comparison(model, basis, j):
    """Sup distance on (0, 1/2] between eigenfunction j and its turning-point
    comparison function built from the Bessel function of order one.

    The comparison is A * S * J1(sqrt(lambda_j) S) / sqrt(2 S sqrt(w)), with
    S the Liouville-Green phase and A fixed by unit weighted norm, matching
    the eigenfunction normalization.  Accuracy degrades away from the left
    endpoint; that is expected and simply reflected in the returned value.
    """
    j = int(j)
    if j < 4:
        raise ValueError("the comparison lives in the asymptotic regime; use j >= 4")
    if j >= basis.n_modes:
        raise ValueError(f"mode {j} not in basis ({basis.n_modes} modes)")
    x = basis.interior_grid
    w = basis.weight_values
    s_vals = _phase_values(model, basis)
    z = np.sqrt(basis.eigenvalues[j]) * s_vals
    comp = s_vals * j1(z) / np.sqrt(2.0 * s_vals * np.sqrt(w))
    comp /= np.sqrt(basis.spacing * np.sum(comp**2 * w))
    phi = basis.eigenfunctions[:, j]
    if comp[0] * phi[0] < 0.0:
        comp = -comp
    mask = x <= 0.5
    return float(np.max(np.abs(phi[mask] - comp[mask])))
