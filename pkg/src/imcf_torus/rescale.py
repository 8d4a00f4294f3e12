"""Blow-up of the inner band and comparison with the catenary.

Near the inner ring the bottom graph ``w`` is recentred at its lowest point
and divided by that height ``u_min``. If the torus were to pinch, these
rescaled graphs would converge to ``cosh``, whose revolved band carries total
curvature ``4 pi``; the band estimate keeps the actual integral below that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from . import geometry as geo


@dataclass(frozen=True, eq=False)
class RescaledBand:
    """Rescaled bottom graph on a uniform grid over ``[-a_tilde, a_tilde]``.

    ``w_tilde`` has its minimum 1 at ``x = 0``. Derivatives come from the
    cubic spline through the original samples; ``v_field`` is
    ``sqrt(1 + w_prime**2)``.
    """

    scale: float
    x: np.ndarray
    w_tilde: np.ndarray
    w_prime: np.ndarray
    w_second: np.ndarray
    v_field: np.ndarray
    u_min: float
    center: float
    a_tilde: float

    def __len__(self):
        return len(self.x)

    @classmethod
    def from_samples(cls, x, w):
        """Wrap graph samples as they are (no recentring, no scaling)."""
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        spl = CubicSpline(x, w)
        wp = spl(x, 1)
        return cls(
            scale=1.0,
            x=x,
            w_tilde=w,
            w_prime=wp,
            w_second=spl(x, 2),
            v_field=np.sqrt(1.0 + wp**2),
            u_min=float(w.min()),
            center=0.0,
            a_tilde=float(min(-x[0], x[-1])),
        )

    @property
    def default_window(self):
        return min(3.0, 0.5 * self.a_tilde)


def _spline_minimum(spl, x, w):
    j = int(np.argmin(w))
    j = min(max(j, 1), len(x) - 2)
    lo, hi = x[j - 1], x[j + 1]
    d1, d2 = spl.derivative(1), spl.derivative(2)
    c = float(x[j])
    for _ in range(20):
        curv = float(d2(c))
        if curv <= 0.0:
            break
        step = float(d1(c)) / curv
        c = min(max(c - step, lo), hi)
        if abs(step) <= 1e-15 * (hi - lo):
            break
    return c, float(spl(c))


def rescale_graph(x, w, a=None, n_grid=None):
    """Recentre graph samples at their minimum and divide by the minimum height.

    Parameters
    ----------
    x, w : array_like
        Strictly increasing abscissae and positive heights.
    a : float, optional
        Half-width (unscaled) of the window kept around the minimum; by
        default the largest symmetric window inside the data.
    n_grid : int, optional
        Number of output samples; defaults to ``len(x)`` rounded up to odd so
        that ``x = 0`` is a sample.

    Raises
    ------
    PinchError
        If the minimum height is not positive.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.ndim != 1 or x.shape != w.shape or len(x) < 5:
        raise ValueError("need at least 5 graph samples")
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("x must be strictly increasing")
    spl = CubicSpline(x, w)
    c, u_min = _spline_minimum(spl, x, w)
    if not u_min > 0.0:
        raise geo.PinchError(f"minimum height {u_min:.3g} is not positive")
    room = min(c - x[0], x[-1] - c)
    a = room if a is None else float(a)
    if not 0.0 < a <= room * (1.0 + 1e-12):
        raise ValueError(f"half-width {a:.6g} outside (0, {room:.6g}]")
    a = min(a, room)
    if n_grid is None:
        n_grid = len(x) | 1
    a_t = a / u_min
    xt = np.linspace(-a_t, a_t, n_grid)
    xs = c + u_min * xt
    wp = spl(xs, 1)
    return RescaledBand(
        scale=1.0 / u_min,
        x=xt,
        w_tilde=spl(xs) / u_min,
        w_prime=wp,
        w_second=u_min * spl(xs, 2),
        v_field=np.sqrt(1.0 + wp**2),
        u_min=u_min,
        center=c,
        a_tilde=a_t,
    )


def rescale_band(band, curve, n_grid=None, margin=3):
    """Rescaled graph of a band (see :func:`diagnostics.build_band`).

    The spline runs through the band nodes plus ``margin`` bottom-path nodes
    on each side, so the vertical tangents at the ends of the bottom arc do
    not enter.
    """
    path = band.path
    (jl, _), (jr, _) = band.ends
    lo = max(jl - margin, 0)
    hi = min(jr + 1 + margin, len(path) - 1)
    pts = curve.nodes[path[lo : hi + 1]]
    if n_grid is None:
        n_grid = 2 * len(band.node_ids) + 1
    # the vertex is refitted on the spline; the margin nodes keep c +- a inside
    return rescale_graph(pts[:, 0], pts[:, 1], a=band.a, n_grid=n_grid)


def graph_mean_curvature(x, w):
    """Mean curvature ``w''/v**3 - 1/(w v)`` of the revolved graph.

    Second-order finite differences (one-sided at the ends); ``x`` may be
    nonuniform.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if len(x) < 5:
        raise ValueError("need at least 5 samples")
    wp = np.gradient(w, x, edge_order=2)
    wpp = np.empty_like(w)
    h1 = np.diff(x)[:-1]
    h2 = np.diff(x)[1:]
    wpp[1:-1] = 2.0 * (h1 * w[2:] - (h1 + h2) * w[1:-1] + h2 * w[:-2]) / (h1 * h2 * (h1 + h2))
    wpp[0] = 2.0 * wpp[1] - wpp[2]
    wpp[-1] = 2.0 * wpp[-2] - wpp[-3]
    v = np.sqrt(1.0 + wp**2)
    return wpp / v**3 - 1.0 / (w * v)


class CatenaryDeviation(NamedTuple):
    w: float
    w_prime: float
    w_second: float
    gamma: float
    gamma_residual: float
    x0: float
    n_samples: int


def catenary_deviation(rescaled, x0=None):
    """Sup-norm distance of the rescaled graph from ``cosh`` on ``[-x0, x0]``.

    Also fits ``gamma`` in ``[0.1, 10]`` minimising
    ``sup |w - cosh(gamma x) / gamma|`` over the window.
    """
    if x0 is None:
        x0 = rescaled.default_window
    if x0 > rescaled.a_tilde * (1.0 + 1e-12):
        raise ValueError(f"window {x0:.6g} exceeds the band ({rescaled.a_tilde:.6g})")
    m = np.abs(rescaled.x) <= x0
    if not m.any():
        raise ValueError("window contains no samples")
    x = rescaled.x[m]
    w = rescaled.w_tilde[m]

    def sup_dev(g):
        return float(np.max(np.abs(w - np.cosh(g * x) / g)))

    fit = minimize_scalar(sup_dev, bounds=(0.1, 10.0), method="bounded", options={"xatol": 1e-10})
    return CatenaryDeviation(
        w=float(np.max(np.abs(w - np.cosh(x)))),
        w_prime=float(np.max(np.abs(rescaled.w_prime[m] - np.sinh(x)))),
        w_second=float(np.max(np.abs(rescaled.w_second[m] - np.cosh(x)))),
        gamma=float(fit.x),
        gamma_residual=float(fit.fun),
        x0=float(x0),
        n_samples=int(m.sum()),
    )


def contradiction_integral(x, w, window=None):
    """``2 pi int w''/(1 + w'^2)^(3/2) dx`` by the midpoint rule.

    On each cell ``w'`` is the divided difference and ``w''`` the mean of the
    second differences at its two end nodes (the nearest interior value at
    the ends of the data). ``window`` is ``x0`` for ``[-x0, x0]`` or a pair
    ``(lo, hi)``; cells are clipped to it. Defaults to the whole data range.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if window is None:
        lo, hi = x[0], x[-1]
    elif np.ndim(window) == 0:
        lo, hi = -float(window), float(window)
    else:
        lo, hi = map(float, window)
    if not hi > lo or len(x) < 3:
        return 0.0
    if lo < x[0] - 1e-12 * abs(x[0]) or hi > x[-1] + 1e-12 * abs(x[-1]):
        raise ValueError("window exceeds the sampled domain")
    dx = np.diff(x)
    h1, h2 = dx[:-1], dx[1:]
    d2 = np.empty_like(w)
    d2[1:-1] = 2.0 * (h1 * w[2:] - (h1 + h2) * w[1:-1] + h2 * w[:-2]) / (h1 * h2 * (h1 + h2))
    d2[0], d2[-1] = d2[1], d2[-2]
    wp = np.diff(w) / dx
    wpp = 0.5 * (d2[1:] + d2[:-1])
    overlap = np.clip(np.minimum(x[1:], hi) - np.maximum(x[:-1], lo), 0.0, None)
    return 2.0 * math.pi * float(np.sum(wpp / (1.0 + wp**2) ** 1.5 * overlap))
