"""Gauss-Legendre quadrature helpers shared by the model and fixation code."""

import numpy as np
from numpy.polynomial.legendre import leggauss

_NODES8, _WEIGHTS8 = leggauss(8)
_NODES16, _WEIGHTS16 = leggauss(16)
_NODES24, _WEIGHTS24 = leggauss(24)


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement fails to reach the requested tolerance."""


def gl_panel(f, a, b, nodes=_NODES16, weights=_WEIGHTS16):
    """Single Gauss-Legendre panel of f over [a, b]; f maps arrays to arrays."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.dot(weights, f(mid + half * nodes))


def adaptive_gl(f, a, b, tol, max_depth=48):
    """Adaptive Gauss-Legendre integral of f over [a, b].

    Bisects until a 16-node panel and its two half-panels agree within the
    (absolute) tolerance budget for the subinterval.
    """
    if a == b:
        return 0.0

    def recurse(lo, hi, budget, depth):
        mid = 0.5 * (lo + hi)
        whole = gl_panel(f, lo, hi)
        halves = gl_panel(f, lo, mid) + gl_panel(f, mid, hi)
        if abs(whole - halves) <= budget:
            return halves
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive quadrature stalled on [{lo:.6g}, {hi:.6g}] "
                f"(estimate gap {abs(whole - halves):.3e}, budget {budget:.3e})"
            )
        return recurse(lo, mid, 0.5 * budget, depth + 1) + recurse(
            mid, hi, 0.5 * budget, depth + 1
        )

    return recurse(a, b, tol, 0)


def panel_batch(f, lo, hi, nodes=_NODES16, weights=_WEIGHTS16):
    """Gauss-Legendre panels for many [lo_i, hi_i] intervals at once."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    samples = f(mid[:, None] + half[:, None] * nodes[None, :])
    return half * (samples @ weights)


def segment_integrals(f, edges, tol):
    """Integrals of f over every consecutive [edges[i], edges[i+1]] segment.

    All segments are first integrated with a vectorized 16-node panel and an
    8-node panel; segments where the two disagree beyond the per-segment share
    of tol fall back to scalar adaptive quadrature.
    """
    edges = np.asarray(edges, float)
    lo, hi = edges[:-1], edges[1:]
    coarse = panel_batch(f, lo, hi, _NODES8, _WEIGHTS8)
    fine = panel_batch(f, lo, hi, _NODES16, _WEIGHTS16)
    out = fine.copy()
    budget = tol / max(len(lo), 1)
    bad = np.abs(fine - coarse) > budget
    for i in np.nonzero(bad)[0]:
        out[i] = adaptive_gl(f, lo[i], hi[i], budget)
    return out
