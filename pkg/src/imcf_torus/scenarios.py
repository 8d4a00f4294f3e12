"""Initial data: round and Fourier-perturbed tori, circles, catenary samples."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import flow
from . import geometry as geo

# resolution of the numerical mean-convexity check for perturbed tori
CHECK_NODES = 1024


def _angles(n):
    # decreasing angle from the top of the circle gives counterclockwise order
    return -2.0 * np.pi * np.arange(n) / n


def make_circle(center, radius, n=256):
    """Circle of ``radius`` around ``center`` (upper half-plane), ``n`` nodes."""
    cx, cy = center
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    phi = _angles(n)
    return geo.GeneratingCurve(np.c_[cx + radius * np.sin(phi), cy + radius * np.cos(phi)])


def round_torus_h_min(R, r):
    """Analytic minimum of H on the round torus, attained on the inner ring."""
    return 1.0 / r - 1.0 / (R - r)


def make_round_torus(R, r, n=512):
    """Profile circle of radius ``r`` centred at ``(0, R)`` with ``n`` nodes.

    Raises
    ------
    NotMeanConvexError
        If ``R <= 2 r``: the inner ring then has ``H = 1/r - 1/(R - r) <= 0``.
    """
    if not r > 0.0:
        raise ValueError("r must be positive")
    if n < geo.MIN_NODES:
        raise geo.CurveError(f"need at least {geo.MIN_NODES} nodes, got {n}")
    if not R > 2.0 * r:
        raise flow.NotMeanConvexError(
            f"not mean-convex: R = {R:g} <= 2r = {2 * r:g}, so H = 1/r - 1/(R - r) = "
            f"{round_torus_h_min(R, r):.6g} <= 0 on the inner ring"
        )
    return make_circle((0.0, R), r, n)


def _normalize_coeffs(coeffs):
    out = []
    for item in coeffs or ():
        m, c, *rest = item
        phase = float(rest[0]) if rest else 0.0
        if int(m) != m or m < 1:
            raise ValueError(f"mode number must be a positive integer, got {m}")
        out.append((int(m), float(c), phase))
    return out


def _perturbed_nodes(R, r, coeffs, n):
    phi = _angles(n)
    rho = np.full(n, float(r))
    for m, c, phase in coeffs:
        rho += r * c * np.cos(m * phi + phase)
    return phi, rho


def make_perturbed_torus(R, r, coeffs=(), n=512):
    """Torus profile with radius ``rho(phi) = r (1 + sum c_m cos(m phi + phase_m))``.

    ``coeffs`` lists ``(m, c_m)`` or ``(m, c_m, phase_m)``. Nodes are
    ``(rho sin phi, R + rho cos phi)``. Mean-convexity and embeddedness are
    checked numerically on a ``CHECK_NODES``-node copy and on the returned
    curve.

    Raises
    ------
    CurveError
        If ``rho <= 0``, the curve leaves the upper half-plane or
        self-intersects.
    NotMeanConvexError
        If ``H <= 0`` somewhere; the message names the offending node.
    """
    coeffs = _normalize_coeffs(coeffs)
    if not coeffs:
        return make_round_torus(R, r, n)
    if not r > 0.0:
        raise ValueError("r must be positive")
    curves = []
    for m in (CHECK_NODES, n):
        phi, rho = _perturbed_nodes(R, r, coeffs, m)
        if np.any(rho <= 0.0):
            raise geo.CurveError("perturbed radius is not positive everywhere")
        nodes = np.c_[rho * np.sin(phi), R + rho * np.cos(phi)]
        if np.any(nodes[:, 1] <= 0.0):
            raise geo.CurveError("perturbed profile reaches the rotation axis")
        c = geo.GeneratingCurve(nodes)
        flow.validate_initial(c)
        curves.append(c)
    return curves[-1]


class GraphSamples(NamedTuple):
    x: np.ndarray
    w: np.ndarray
    w_prime: np.ndarray
    w_second: np.ndarray


def make_catenary_band(x0, n=4096, gamma=1.0):
    """Exact samples of ``cosh(gamma x) / gamma`` on ``[-x0, x0]``."""
    if not x0 > 0.0:
        raise ValueError("x0 must be positive")
    x = np.linspace(-x0, x0, n)
    return GraphSamples(
        x=x,
        w=np.cosh(gamma * x) / gamma,
        w_prime=np.sinh(gamma * x),
        w_second=gamma * np.cosh(gamma * x),
    )
