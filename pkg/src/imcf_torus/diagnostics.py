"""Monitored quantities of an evolving torus profile.

One :class:`DiagnosticsRecord` is produced per sample time. The reference
data fixed at the initial time (band half-width, height bound, sup of H and
the initial area) are carried in :class:`ReferenceData` so that a record can
be recomputed from a stored snapshot alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields
from typing import NamedTuple

import numpy as np

from . import _kernels
from . import geometry as geo

FOUR_PI = 4.0 * math.pi

SERIES_COLUMNS = (
    "t",
    "area",
    "u_min",
    "h_min",
    "h_max",
    "a2_max",
    "band_integral",
    "eps_hat",
    "gauss_bonnet_residual",
    "willmore",
    "willmore_bound",
    "l2a",
    "l2a_bound",
    "hausdorff_prev",
)


class BandError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceData:
    """Quantities frozen at the reference time ``t0 = 0``.

    ``a`` is the band half-width, ``b`` the maximal height of the initial
    profile (the slope bound on the band ends is ``b / a``).
    """

    a: float
    b: float
    h_sup: float
    area: float
    a2_max: float
    u_min: float
    chi: int = 0

    @property
    def willmore_bound(self):
        return self.h_sup**2 * self.area

    @property
    def l2a_bound(self):
        return 3.0 * self.h_sup**2 * self.area - 2.0 * math.pi * self.chi

    @property
    def slope_bound(self):
        return self.b / self.a


def bottom_minimum(curve, decomposition):
    """Lowest point of the bottom graph with parabolic sub-node refinement.

    Returns ``(x1, u)`` of the vertex of the parabola through the lowest
    bottom node and its two neighbours on the bottom arc.
    """
    path = decomposition.bottom_path
    pts = curve.nodes[path]
    j = int(np.argmin(pts[1:-1, 1])) + 1
    (x0, y0), (x1, y1), (x2, y2) = pts[j - 1], pts[j], pts[j + 1]
    # divided differences of the interpolating parabola
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    c2 = (d12 - d01) / (x2 - x0)
    if c2 <= 0.0:
        return float(x1), float(y1)
    xv = 0.5 * (x0 + x1) - d01 / (2.0 * c2)
    xv = min(max(xv, x0), x2)
    yv = y0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1)
    return float(xv), float(yv)


def reference_data(curve, a=None):
    """Freeze band half-width and bounds from the initial profile.

    With the axis recentred at the lowest point ``c`` of the bottom graph,
    ``a = min(c - a0, b0 - c) / 2`` where ``a0, b0`` are the extreme x1
    values of the profile.
    """
    fld = geo.curvature_field(curve)
    dec = geo.decompose_graphs(curve, fld.nu)
    c, _ = bottom_minimum(curve, dec)
    if a is None:
        a = 0.5 * min(c - dec.a, dec.b - c)
    return ReferenceData(
        a=float(a),
        b=float(curve.u.max()),
        h_sup=fld.H_max,
        area=geo.surface_area(curve),
        a2_max=float(fld.A2.max()),
        u_min=curve.u_min,
    )


@dataclass(frozen=True, eq=False)
class Band:
    """Arc of the bottom graph over ``(center - a, center + a)``.

    ``ends`` holds, for the left and right end, the index on the bottom path
    of the edge containing the end and the fractional position on that edge.
    """

    a: float
    center: float
    node_ids: np.ndarray
    boundary_slope: float
    nu_e2_boundary: float
    ends: tuple
    path: np.ndarray


def _locate(xs, x):
    j = int(np.searchsorted(xs, x, side="right")) - 1
    theta = (x - xs[j]) / (xs[j + 1] - xs[j])
    return j, float(theta)


def build_band(curve, decomposition, a, nu=None, center=None):
    """Bottom-graph arc of half-width ``a`` around the lowest point.

    Raises
    ------
    BandError
        If ``center +- a`` leaves the domain of the bottom graph.
    """
    if nu is None:
        nu, _ = geo.compute_normals_and_k(curve)
    if center is None:
        center, _ = bottom_minimum(curve, decomposition)
    path = decomposition.bottom_path
    xs = curve.nodes[path, 0]
    lo, hi = center - a, center + a
    if not (xs[0] < lo and hi < xs[-1]):
        raise BandError(
            f"band too wide: ({lo:.6g}, {hi:.6g}) not inside ({xs[0]:.6g}, {xs[-1]:.6g})"
        )
    ends = (_locate(xs, lo), _locate(xs, hi))
    nu_path = nu[path]
    end_nu = []
    for j, theta in ends:
        v = (1.0 - theta) * nu_path[j] + theta * nu_path[j + 1]
        end_nu.append(v / np.hypot(*v))
    slopes = [abs(v[0] / v[1]) for v in end_nu]
    inside = (xs > lo) & (xs < hi)
    return Band(
        a=float(a),
        center=float(center),
        node_ids=path[inside],
        boundary_slope=float(max(slopes)),
        nu_e2_boundary=float(max(v[1] for v in end_nu)),
        ends=ends,
        path=path,
    )


class BandIntegral(NamedTuple):
    value: float
    eps_hat: float
    positive_k_nodes: int


def band_gauss_integral(band, curve, fld=None, tol=1e-12):
    """``int |K| d mu`` over the revolved band, and ``1 - value / (4 pi)``.

    Trapezoid rule in arc length along the bottom arc, with the two partial
    end cells closed by linear interpolation at ``x1 = center +- a``.
    ``positive_k_nodes`` counts band nodes where ``K > tol`` (the continuum
    band has ``K < 0``); a warning is issued when it is nonzero.
    """
    if fld is None:
        fld = geo.curvature_field(curve)
    path = band.path
    g = np.abs(fld.K[path]) * curve.u[path]
    pts = curve.nodes[path]
    (jl, tl), (jr, tr) = band.ends
    left = pts[jl] + tl * (pts[jl + 1] - pts[jl])
    right = pts[jr] + tr * (pts[jr + 1] - pts[jr])
    g_left = g[jl] + tl * (g[jl + 1] - g[jl])
    g_right = g[jr] + tr * (g[jr + 1] - g[jr])
    xy = np.vstack([left, pts[jl + 1 : jr + 1], right])
    gv = np.concatenate([[g_left], g[jl + 1 : jr + 1], [g_right]])
    ds = np.hypot(*np.diff(xy, axis=0).T)
    value = 2.0 * math.pi * float(np.sum(0.5 * (gv[1:] + gv[:-1]) * ds))
    n_pos = int(np.count_nonzero(fld.K[band.node_ids] > tol))
    if n_pos:
        warnings.warn(f"{n_pos} band nodes have K > 0 (discretization)", RuntimeWarning)
    return BandIntegral(value, 1.0 - value / FOUR_PI, n_pos)


class Energies(NamedTuple):
    willmore: float
    l2a: float
    gauss: float
    gauss_bonnet_residual: float
    willmore_bound: float
    l2a_bound: float


def energy_suite(curve, fld, ref):
    """Willmore-type energy, L2 curvature energy and total Gauss curvature.

    Bounds come from the initial data in ``ref``: ``sup H0^2 |N0|`` and
    ``3 sup H0^2 |N0| - 2 pi chi``.
    """
    willmore = geo.surface_integral(curve, fld.H**2)
    l2a = geo.surface_integral(curve, fld.A2)
    gauss = geo.surface_integral(curve, fld.K)
    return Energies(
        willmore=willmore,
        l2a=l2a,
        gauss=gauss,
        gauss_bonnet_residual=abs(gauss - 2.0 * math.pi * ref.chi),
        willmore_bound=ref.willmore_bound,
        l2a_bound=ref.l2a_bound,
    )


def _arc_derivatives(nodes, f):
    """First and second arc-length derivatives on the nonuniform closed grid."""
    h = _kernels.edge_lengths(nodes)
    h1 = np.roll(h, 1)
    h2 = h
    fm, fp = np.roll(f, 1), np.roll(f, -1)
    den = h1 * h2 * (h1 + h2)
    d1 = (h1**2 * (fp - f) + h2**2 * (f - fm)) / den
    d2 = 2.0 * (h1 * fp - (h1 + h2) * f + h2 * fm) / den
    return d1, d2


def h_evolution_rhs(nodes, H, A2):
    """``(1/H^2) Lap H - |A|^2/H - 2 |grad H|^2 / H^3`` for axisymmetric data.

    The Laplace-Beltrami operator of the revolved surface acting on ``f(s)``
    is ``f_ss + (u_s / u) f_s``.
    """
    u = nodes[:, 1]
    hs, hss = _arc_derivatives(nodes, H)
    us, _ = _arc_derivatives(nodes, u)
    lap = hss + us / u * hs
    return lap / H**2 - A2 / H - 2.0 * hs**2 / H**3


class EvolutionResidual(NamedTuple):
    max_abs: float
    residual: np.ndarray
    mask: np.ndarray


def h_evolution_residual(before, after, dt):
    """Finite-difference residual of the evolution equation for H.

    ``before`` and ``after`` are consecutive states (or curves) with node
    correspondence. The residual is evaluated at every node; its maximum is
    taken over nodes with ``H > 0.1 max H``.
    """
    if hasattr(before, "mesh_id") and hasattr(after, "mesh_id"):
        if before.mesh_id != after.mesh_id:
            raise ValueError("remesh between states: node correspondence lost")
    c0 = getattr(before, "curve", before)
    c1 = getattr(after, "curve", after)
    if len(c0) != len(c1):
        raise ValueError("node counts differ")
    f0 = geo.curvature_field(c0)
    f1 = geo.curvature_field(c1)
    res = (f1.H - f0.H) / dt - h_evolution_rhs(c0.nodes, f0.H, f0.A2)
    mask = f0.H > 0.1 * f0.H.max()
    return EvolutionResidual(float(np.max(np.abs(res[mask]))), res, mask)


def area_law_check(records, t_limit=None):
    """Largest deviation ``|log(area(t)/area(0)) - t|`` over the samples.

    ``records`` may be records or ``(t, area)`` pairs; samples with
    ``t > t_limit`` are ignored.
    """
    pairs = [(r.t, r.area) if hasattr(r, "area") else tuple(r) for r in records]
    if len(pairs) < 2:
        raise ValueError("need at least two samples")
    t0, a0 = pairs[0]
    dev = [
        abs(math.log(a / a0) - (t - t0))
        for t, a in pairs
        if t_limit is None or t <= t_limit
    ]
    return max(dev)


def h_level_indices(records, factor=0.5):
    """Indices of the records where ``H_min`` first drops below each level.

    Levels are ``H_min(0) * factor**j``, ``j = 1, 2, ...``. These samples are
    evenly spaced in ``log H_min`` and hence geometrically spaced in the
    distance to the singular time, unlike the regular time samples.
    """
    if not records:
        return []
    level = factor * records[0].h_min
    out = []
    for i, r in enumerate(records):
        if r.h_min <= level:
            out.append(i)
            while level >= r.h_min:
                level *= factor
    return out


class LimitReport(NamedTuple):
    distances: np.ndarray
    decreasing: bool
    ratio: float
    limit: object
    embedded: bool
    decomposes: bool


def limit_curve_monitor(curves):
    """Cauchy test on late snapshots and a geometric extrapolation of the limit.

    Successive Hausdorff distances ``d_i`` should decrease. With
    ``q = d_last / d_prev < 1`` the remaining motion is summed as a geometric
    series: every node of the last curve is pushed along its offset from the
    previous curve by ``q / (1 - q)``.
    """
    curves = list(curves)
    if len(curves) < 3:
        raise ValueError("need at least three snapshots")
    d = np.array([geo.hausdorff_distance(a, b) for a, b in zip(curves[:-1], curves[1:])])
    decreasing = bool(np.all(np.diff(d) < 0.0))
    last, prev = curves[-1], curves[-2]
    q = float(d[-1] / d[-2]) if d[-2] > 0 else math.nan
    limit = last
    if not decreasing:
        warnings.warn("no convergence detected", RuntimeWarning)
    elif d[-1] > 0.0 and q < 1.0:
        _, foot = geo.distance_to_polyline(prev, last.nodes)
        try:
            limit = geo.GeneratingCurve(last.nodes + (last.nodes - foot) * (q / (1.0 - q)))
        except geo.CurveError:
            limit = None
    embedded = decomposes = False
    if limit is not None:
        embedded, _ = geo.is_embedded(limit)
        try:
            geo.decompose_graphs(limit)
            decomposes = True
        except geo.GraphStructureError:
            pass
    return LimitReport(d, decreasing, q, limit, embedded, decomposes)


@dataclass(eq=False)
class DiagnosticsRecord:
    """All monitored scalars at one sample time.

    ``curve`` (the sampled profile) and ``band`` are attached for downstream
    checks but are not part of the series file.
    """

    t: float
    area: float
    u_min: float
    h_min: float
    h_max: float
    a2_max: float
    band_integral: float
    eps_hat: float
    gauss_bonnet_residual: float
    willmore: float
    willmore_bound: float
    l2a: float
    l2a_bound: float
    hausdorff_prev: float
    curve: object = field(default=None, repr=False)
    band: object = field(default=None, repr=False)

    def row(self):
        return [getattr(self, name) for name in SERIES_COLUMNS]

    @classmethod
    def from_row(cls, values):
        return cls(*[float(v) for v in values])


assert tuple(f.name for f in fields(DiagnosticsRecord))[: len(SERIES_COLUMNS)] == SERIES_COLUMNS


def sample_record(curve, t, ref, prev=None):
    """Evaluate every monitored quantity on one profile."""
    fld = geo.curvature_field(curve)
    dec = geo.decompose_graphs(curve, fld.nu)
    band = build_band(curve, dec, ref.a, fld.nu)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        bi = band_gauss_integral(band, curve, fld)
    en = energy_suite(curve, fld, ref)
    return DiagnosticsRecord(
        t=float(t),
        area=geo.surface_area(curve),
        u_min=curve.u_min,
        h_min=fld.H_min,
        h_max=fld.H_max,
        a2_max=float(fld.A2.max()),
        band_integral=bi.value,
        eps_hat=bi.eps_hat,
        gauss_bonnet_residual=en.gauss_bonnet_residual,
        willmore=en.willmore,
        willmore_bound=en.willmore_bound,
        l2a=en.l2a,
        l2a_bound=en.l2a_bound,
        hausdorff_prev=0.0 if prev is None else geo.hausdorff_distance(prev, curve),
        curve=curve,
        band=band,
    )
