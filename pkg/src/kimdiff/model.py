"""Coefficient model for the degenerate forward equation on [0, 1].

The equation's coefficients are kept in factored form

    F(x) = x (1 - x) Psi(x),        G(x) = x (1 - x) Pi(x),

with Psi and Pi polynomials and Psi strictly positive on [0, 1].  Everything
else the solvers need is derived from the factors: the drift-to-diffusion
ratio xi = Pi / Psi, the singular weight 1 / (Psi x (1 - x)), the Schroedinger
potential (2 xi' + xi^2) / 4, and the running integral of xi (computed once on
an anchor grid and reused everywhere).
"""

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial.legendre import leggauss

from ._quadrature import adaptive_gl, segment_integrals

_VALIDATION_POINTS = 10_000
_ANCHOR_GAPS = 1024
_XI_INTEGRAL_TOL = 1e-12
# 24-node rule for the off-anchor remainder of the cached xi integral
_RNODES, _RWEIGHTS = leggauss(24)

Fields = namedtuple("Fields", ["diffusion", "drift", "xi", "weight", "potential"])


@dataclass
class CoefficientModel:
    """Factored coefficients of the forward equation.

    psi_coeffs, pi_coeffs: polynomial coefficients in ascending-degree order.
    Construction validates positivity of the diffusion factor by dense
    sampling (10^4 uniform points plus the endpoints).
    """

    psi_coeffs: tuple
    pi_coeffs: tuple
    _anchor_x: np.ndarray = field(init=False, repr=False)
    _anchor_ix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.psi_coeffs = tuple(float(c) for c in self.psi_coeffs)
        self.pi_coeffs = tuple(float(c) for c in self.pi_coeffs)
        if not self.psi_coeffs:
            raise ValueError("psi_coeffs must contain at least one coefficient")
        if not self.pi_coeffs:
            raise ValueError("pi_coeffs must contain at least one coefficient")
        probe = np.linspace(0.0, 1.0, _VALIDATION_POINTS + 1)
        vals = P.polyval(probe, self.psi_coeffs)
        if np.min(vals) <= 0.0:
            k = int(np.argmin(vals))
            raise ValueError(
                "diffusion factor positivity violated: Psi(x) <= 0 near "
                f"x = {probe[k]:.4f} (Psi = {vals[k]:.4g}); the equation "
                "requires Psi > 0 on [0, 1]"
            )
        # Running integral of xi cached on an anchor grid, one quadrature per gap.
        self._anchor_x = np.linspace(0.0, 1.0, _ANCHOR_GAPS + 1)
        gaps = segment_integrals(self.xi, self._anchor_x, 1e-14)
        self._anchor_ix = np.concatenate(([0.0], np.cumsum(gaps)))

    # polynomial factor values

    def psi_at(self, x):
        return P.polyval(np.asarray(x, float), self.psi_coeffs)

    def pi_at(self, x):
        return P.polyval(np.asarray(x, float), self.pi_coeffs)

    def xi(self, x):
        """Drift-to-diffusion ratio Pi(x) / Psi(x)."""
        x = np.asarray(x, float)
        return P.polyval(x, self.pi_coeffs) / P.polyval(x, self.psi_coeffs)

    def xi_prime(self, x):
        """Exact derivative of xi via the polynomial quotient rule."""
        x = np.asarray(x, float)
        psi = P.polyval(x, self.psi_coeffs)
        pi = P.polyval(x, self.pi_coeffs)
        dpsi = P.polyval(x, P.polyder(self.psi_coeffs))
        dpi = P.polyval(x, P.polyder(self.pi_coeffs))
        return (dpi * psi - pi * dpsi) / psi**2

    def diffusion(self, x):
        """F(x) = x (1 - x) Psi(x)."""
        x = np.asarray(x, float)
        return x * (1.0 - x) * self.psi_at(x)

    def drift(self, x):
        """G(x) = x (1 - x) Pi(x)."""
        x = np.asarray(x, float)
        return x * (1.0 - x) * self.pi_at(x)

    def weight(self, x):
        """Singular spectral weight 1 / (Psi(x) x (1 - x)); interior only."""
        x = np.asarray(x, float)
        return 1.0 / (self.psi_at(x) * x * (1.0 - x))

    def potential(self, x):
        """Schroedinger potential (2 xi' + xi^2) / 4 of the self-adjoint form."""
        xi = self.xi(x)
        return 0.25 * (2.0 * self.xi_prime(x) + xi * xi)

    def fields(self, x):
        """All derived scalar fields at interior points x.

        Returns a Fields tuple (diffusion, drift, xi, weight, potential).
        Raises ValueError outside the open interval, where the weight is
        undefined.
        """
        arr = np.asarray(x, float)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("fields are defined on the open interval (0, 1) only")
        return Fields(
            self.diffusion(arr),
            self.drift(arr),
            self.xi(arr),
            self.weight(arr),
            self.potential(arr),
        )

    def xi_integral(self, x):
        """Integral of xi from 0 to x, for x in [0, 1] (scalar or array).

        Uses the cached anchor grid plus a Gauss-Legendre remainder, accurate
        to about 1e-12 absolute; anchors were built by adaptive quadrature.
        """
        arr = np.asarray(x, float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("xi_integral requires 0 <= x <= 1")
        flat = np.atleast_1d(arr).ravel()
        k = np.clip((flat * _ANCHOR_GAPS).astype(int), 0, _ANCHOR_GAPS - 1)
        a = self._anchor_x[k]
        base = self._anchor_ix[k]
        half = 0.5 * (flat - a)
        mid = 0.5 * (flat + a)
        nodes = mid[:, None] + half[:, None] * _RNODES[None, :]
        rem = half * (self.xi(nodes) @ _RWEIGHTS)
        out = (base + rem).reshape(np.atleast_1d(arr).shape)
        return float(out[0]) if arr.ndim == 0 else out

    def xi_integral_direct(self, x, tol=_XI_INTEGRAL_TOL):
        """Integral of xi from 0 to x by adaptive quadrature, no cache.

        Kept as the slow reference path; QuadratureError propagates when the
        refinement stalls.
        """
        return adaptive_gl(self.xi, 0.0, float(x), tol)


def make_kimura(eta, beta):
    """Model with unit diffusion factor and linear selection Pi(x) = eta x + beta.

    eta = beta = 0 gives the neutral case F(x) = x (1 - x), G = 0.
    """
    pi = (float(beta),) if eta == 0 else (float(beta), float(eta))
    return CoefficientModel(psi_coeffs=(1.0,), pi_coeffs=pi)
