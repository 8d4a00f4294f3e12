"""Discrete geometry of a generating curve revolved about the x1-axis.

A torus of revolution is stored as its profile: a closed polyline in the
open upper half-plane, traversed counterclockwise so that the outward normal
is the tangent rotated clockwise. The second coordinate of a node is its
distance ``u`` from the rotation axis.

Surface integrals use ``d mu = 2 pi u ds`` with per-node weights
``ds_i = (h_{i-1} + h_i) / 2``, i.e. the edge midpoint rule applied to the
linear interpolant of the nodal integrand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.interpolate import CubicSpline

from . import _kernels

__all__ = [
    "CurveError",
    "PinchError",
    "GraphStructureError",
    "GeneratingCurve",
    "CurvatureField",
    "GraphDecomposition",
    "EnclosedRegion",
    "compute_normals_and_k",
    "rotational_curvature",
    "mean_and_gauss",
    "curvature_field",
    "node_weights",
    "surface_integral",
    "surface_area",
    "arc_length",
    "periodic_spline",
    "refine",
    "decompose_graphs",
    "is_embedded",
    "enclosed_region_area",
    "contains",
    "sign_identity_check",
    "distance_to_polyline",
    "hausdorff_distance",
]

MIN_NODES = 16


class CurveError(ValueError):
    """Input polyline violates a generating-curve invariant."""


class PinchError(CurveError):
    """A node reached (or crossed) the rotation axis."""


class GraphStructureError(RuntimeError):
    """The curve no longer splits into a bottom and a top graph."""


class GeneratingCurve:
    """Closed, positively oriented polyline in the upper half-plane.

    Parameters
    ----------
    nodes : array_like, shape (n, 2)
        Node coordinates ``(x1, x2)``; the closing edge from the last node to
        the first is implicit.
    orient : bool
        Reverse the node order if the polyline is clockwise. When False a
        clockwise input raises :class:`CurveError`.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes, orient=False):
        x = np.array(nodes, dtype=float)
        if x.ndim != 2 or x.shape[1] != 2:
            raise CurveError(f"nodes must have shape (n, 2), got {x.shape}")
        if x.shape[0] < MIN_NODES:
            raise CurveError(f"need at least {MIN_NODES} nodes, got {x.shape[0]}")
        if not np.all(np.isfinite(x)):
            raise CurveError("non-finite node coordinates")
        if np.any(x[:, 1] <= 0.0):
            i = int(np.argmin(x[:, 1]))
            raise PinchError(f"node {i} has x2 = {x[i, 1]!r} <= 0")
        if np.any(_kernels.edge_lengths(x) == 0.0):
            i = int(np.flatnonzero(_kernels.edge_lengths(x) == 0.0)[0])
            raise CurveError(f"degenerate edge: nodes {i} and {(i + 1) % len(x)} coincide")
        if _shoelace(x) < 0.0:
            if not orient:
                raise CurveError("curve is clockwise; pass orient=True to reverse it")
            x = x[::-1].copy()
        x.setflags(write=False)
        self.nodes = x

    def __len__(self):
        return self.nodes.shape[0]

    def __repr__(self):
        return f"GeneratingCurve(n={len(self)}, u_min={self.u_min:.6g})"

    @property
    def x1(self):
        return self.nodes[:, 0]

    @property
    def u(self):
        return self.nodes[:, 1]

    @property
    def u_min(self):
        return float(self.nodes[:, 1].min())

    def edge_lengths(self):
        return _kernels.edge_lengths(self.nodes)

    def scaled(self, lam):
        """Image under the dilation ``x -> lam * x`` (keeps the axis fixed)."""
        return GeneratingCurve(lam * self.nodes)

    def shifted(self, dx1):
        """Translate along the rotation axis."""
        return GeneratingCurve(self.nodes + np.array([dx1, 0.0]))


def _shoelace(x):
    xs, ys = x[:, 0], x[:, 1]
    return 0.5 * float(np.dot(xs, np.roll(ys, -1)) - np.dot(np.roll(xs, -1), ys))


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Per-node curvature data of the revolved surface.

    ``k`` is the curvature of the profile, ``p = <nu, e2> / u`` the curvature
    of the parallel circle; ``H = k + p``, ``K = k p`` and ``A2 = k**2 + p**2``.
    """

    nu: np.ndarray
    k: np.ndarray
    p: np.ndarray
    H: np.ndarray
    K: np.ndarray
    A2: np.ndarray

    @property
    def H_min(self):
        return float(self.H.min())

    @property
    def H_max(self):
        return float(self.H.max())


def compute_normals_and_k(curve):
    """Outward unit normals and planar curvature at every node.

    Uses the three-point circumscribed-circle stencil; exact on circles for
    any node spacing and second order on smooth curves sampled uniformly.
    ``k > 0`` where the profile bends toward the enclosed region.

    Returns
    -------
    nu : ndarray, shape (n, 2)
    k : ndarray, shape (n,)
    """
    nu, k, _ = _kernels.normals_and_curvature(curve.nodes)
    return nu, k


def rotational_curvature(curve, nu):
    """Principal curvature of the parallel circles, ``<nu, e2> / u``."""
    u = curve.nodes[:, 1]
    if np.any(u <= 0.0):
        raise PinchError("curve touches the rotation axis")
    return nu[:, 1] / u


def mean_and_gauss(k, p):
    """Return ``(H, K, |A|^2)`` from the two principal curvatures."""
    k = np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    return k + p, k * p, k * k + p * p


def curvature_field(curve):
    nu, k = compute_normals_and_k(curve)
    p = rotational_curvature(curve, nu)
    H, K, A2 = mean_and_gauss(k, p)
    return CurvatureField(nu=nu, k=k, p=p, H=H, K=K, A2=A2)


def node_weights(curve):
    """Dual arc length ``(h_{i-1} + h_i) / 2`` attached to each node."""
    h = curve.edge_lengths()
    return 0.5 * (h + np.roll(h, 1))


def surface_integral(curve, values):
    """``int f d mu`` over the revolved surface for nodal values ``f``."""
    return 2.0 * np.pi * float(np.sum(np.asarray(values) * curve.u * node_weights(curve)))


def surface_area(curve):
    """Area of the revolved polyline (sum of frustum areas).

    Homogeneous of degree two in the coordinates and second-order accurate
    for the smooth surface.
    """
    x = curve.nodes
    h = curve.edge_lengths()
    return float(np.pi * np.sum((x[:, 1] + np.roll(x[:, 1], -1)) * h))


def periodic_spline(curve):
    """Periodic cubic spline through the nodes, parametrized by chord length.

    Returns the spline and its knot vector (length ``n + 1``).
    """
    x = curve.nodes
    closed = np.vstack([x, x[:1]])
    s = np.concatenate([[0.0], np.cumsum(curve.edge_lengths())])
    return CubicSpline(s, closed, bc_type="periodic"), s


# 8-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _spline_speed(dspl, s):
    d = dspl(s)
    return np.hypot(d[..., 0], d[..., 1])


def _spline_segment_lengths(spl, knots):
    dspl = spl.derivative()
    h = np.diff(knots)
    pts = knots[:-1, None] + h[:, None] * _GL_X[None, :]
    return h * (_spline_speed(dspl, pts) @ _GL_W)


def arc_length(curve, smooth=False):
    """Perimeter of the polyline, or of its periodic spline when ``smooth``."""
    if not smooth:
        return float(np.sum(curve.edge_lengths()))
    spl, knots = periodic_spline(curve)
    return float(np.sum(_spline_segment_lengths(spl, knots)))


def spline_arclength_points(curve, targets=None, *, fractions=None):
    """Points on the periodic spline at the given arc-length positions.

    ``targets`` are arc lengths measured along the spline from node 0 and
    must lie in ``[0, L)``; alternatively ``fractions`` gives them as
    fractions of ``L``. Each position is found by Newton iteration on the
    Gauss-Legendre arc-length integral within its knot interval.

    Returns
    -------
    pts : ndarray, shape (m, 2)
    L : float
        Spline perimeter.
    """
    spl, knots = periodic_spline(curve)
    dspl = spl.derivative()
    seg = _spline_segment_lengths(spl, knots)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(cum[-1])
    if (targets is None) == (fractions is None):
        raise ValueError("pass exactly one of targets, fractions")
    if fractions is not None:
        targets = total * np.asarray(fractions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg) - 1)
    s0 = knots[idx]
    h = knots[idx + 1] - s0
    tau = s0 + h * (targets - cum[idx]) / seg[idx]
    tol = 1e-15 * total
    for _ in range(8):
        span = tau - s0
        pts = s0[:, None] + span[:, None] * _GL_X[None, :]
        f = cum[idx] + span * (_spline_speed(dspl, pts) @ _GL_W) - targets
        tau = np.clip(tau - f / _spline_speed(dspl, tau), s0, s0 + h)
        if np.max(np.abs(f)) <= tol:
            break
    return spl(tau), total


def refine(curve, factor):
    """Upsample onto the periodic spline with ``factor`` times as many nodes.

    The original nodes are kept; ``factor - 1`` spline points are inserted
    uniformly in the chord parameter of every edge.
    """
    if factor == 1:
        return curve
    spl, knots = periodic_spline(curve)
    frac = np.arange(factor) / factor
    s = (knots[:-1, None] + np.diff(knots)[:, None] * frac[None, :]).ravel()
    pts = spl(s)
    pts[::factor] = curve.nodes
    return GeneratingCurve(pts)


@dataclass(frozen=True, eq=False)
class GraphDecomposition:
    """Split of the profile into a bottom graph ``w`` and a top graph ``v``.

    ``grid`` is the shared uniform grid strictly inside ``(a, b)``; ``bottom``
    and ``top`` are the linear interpolants of the two polyline arcs on it.
    ``bottom_path``/``top_path`` list node ids in increasing x1 order running
    from the leftmost to the rightmost node (both ends included);
    ``bottom_node_ids``/``top_node_ids`` partition all nodes by the sign of
    ``<nu, e2>``.
    """

    a: float
    b: float
    grid: np.ndarray
    bottom: np.ndarray
    top: np.ndarray
    bottom_node_ids: np.ndarray
    top_node_ids: np.ndarray
    bottom_path: np.ndarray
    top_path: np.ndarray

    def bottom_polyline(self, curve):
        return curve.nodes[self.bottom_path]

    def top_polyline(self, curve):
        return curve.nodes[self.top_path]

    def tol_convex(self):
        return 1e-6 * (self.b - self.a)

    def bottom_second_differences(self):
        w = self.bottom
        return w[2:] - 2.0 * w[1:-1] + w[:-2]


def _sign_classes(nu2, tol=1e-9):
    """Sign of <nu, e2> per node, near-zero nodes joining their neighbours."""
    s = np.sign(nu2).astype(int)
    s[np.abs(nu2) < tol] = 0
    if not np.any(s):
        raise GraphStructureError("<nu, e2> vanishes at every node")
    # flood undecided nodes from decided neighbours until none remain
    while np.any(s == 0):
        prev = np.roll(s, 1)
        nxt = np.roll(s, -1)
        vote = np.sign(prev + nxt)
        # a tie between opposite neighbours goes to the predecessor's side
        vote = np.where(vote == 0, prev, vote)
        vote = np.where(vote == 0, nxt, vote)
        s = np.where(s == 0, vote, s)
    return s


def _cyclic_path(start, stop, n):
    if stop >= start:
        return np.arange(start, stop + 1)
    return np.concatenate([np.arange(start, n), np.arange(0, stop + 1)])


def decompose_graphs(curve, nu=None, n_grid=None):
    """Split the profile into a convex bottom graph and a top graph.

    Parameters
    ----------
    curve : GeneratingCurve
    nu : ndarray, optional
        Outward normals; computed when omitted.
    n_grid : int, optional
        Interior grid size over ``(a, b)``; defaults to the node count.

    Raises
    ------
    GraphStructureError
        If the sign of ``<nu, e2>`` changes more than twice around the curve,
        or an arc fails to be a graph over x1.
    """
    if nu is None:
        nu, _ = compute_normals_and_k(curve)
    x = curve.nodes
    n = len(curve)
    s = _sign_classes(nu[:, 1])
    changes = int(np.count_nonzero(s != np.roll(s, 1)))
    if changes != 2:
        raise GraphStructureError(
            f"<nu, e2> changes sign {changes} times around the curve (expected 2)"
        )
    i_left = int(np.argmin(x[:, 0]))
    i_right = int(np.argmax(x[:, 0]))
    a = float(x[i_left, 0])
    b = float(x[i_right, 0])
    # counterclockwise: bottom runs left -> right, top runs right -> left
    bottom_path = _cyclic_path(i_left, i_right, n)
    top_path = _cyclic_path(i_right, i_left, n)[::-1]
    for name, path in (("bottom", bottom_path), ("top", top_path)):
        if np.any(np.diff(x[path, 0]) <= 0.0):
            raise GraphStructureError(f"{name} arc is not a graph over x1")
    if n_grid is None:
        n_grid = n
    grid = np.linspace(a, b, n_grid + 2)[1:-1]
    w = np.interp(grid, x[bottom_path, 0], x[bottom_path, 1])
    v = np.interp(grid, x[top_path, 0], x[top_path, 1])
    return GraphDecomposition(
        a=a,
        b=b,
        grid=grid,
        bottom=w,
        top=v,
        bottom_node_ids=np.flatnonzero(s < 0),
        top_node_ids=np.flatnonzero(s > 0),
        bottom_path=bottom_path,
        top_path=top_path,
    )


def _orient_exact(a, b, c):
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def _between(a, b, p):
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _exact_pair_crosses(x, i, j):
    n = len(x)
    if i == j:
        a, b, c = x[i - 1], x[i], x[(i + 1) % n]
        if _orient_exact(a, b, c) != 0:
            return False
        dot = sum((Fraction(b[m]) - Fraction(a[m])) * (Fraction(c[m]) - Fraction(b[m])) for m in range(2))
        return dot < 0
    p, q = x[i], x[(i + 1) % n]
    r, s = x[j], x[(j + 1) % n]
    o1, o2 = _orient_exact(p, q, r), _orient_exact(p, q, s)
    o3, o4 = _orient_exact(r, s, p), _orient_exact(r, s, q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and _between(p, q, r))
        or (o2 == 0 and _between(p, q, s))
        or (o3 == 0 and _between(r, s, p))
        or (o4 == 0 and _between(r, s, q))
    )


def is_embedded(curve):
    """Check that no two non-adjacent edges meet.

    Floating-point orientation tests are filtered with a static error bound;
    pairs the filter cannot decide are re-tested in rational arithmetic.

    Returns
    -------
    embedded : bool
    pair : tuple of int or None
        Edge indices ``(i, j)`` of the first intersection found (edge ``i``
        joins node ``i`` to node ``i + 1``); ``(i, i)`` reports a fold-back at
        node ``i``.
    """
    x = curve.nodes if isinstance(curve, GeneratingCurve) else np.asarray(curve, dtype=float)
    flag, i, j, unc = _kernels.sweep(x, False)
    if flag == _kernels.CROSSING:
        return False, (int(i), int(j))
    for i, j in unc:
        if _exact_pair_crosses(x, int(i), int(j)):
            return False, (int(i), int(j))
    return True, None


@dataclass(frozen=True, eq=False)
class EnclosedRegion:
    """Open region bounded by an embedded generating curve."""

    curve: GeneratingCurve
    area: float

    def contains(self, points):
        return contains(self.curve, points)


def enclosed_region_area(curve):
    """Shoelace area of the enclosed region (positive for valid curves)."""
    ok, pair = is_embedded(curve)
    if not ok:
        raise CurveError(f"curve is not embedded (edges {pair} intersect)")
    return _shoelace(curve.nodes)


def enclosed_region(curve):
    return EnclosedRegion(curve=curve, area=enclosed_region_area(curve))


def winding_numbers(curve, points):
    """Winding number of the polyline around each query point."""
    x = curve.nodes
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ax, ay = x[:, 0][None, :], x[:, 1][None, :]
    bx, by = np.roll(x[:, 0], -1)[None, :], np.roll(x[:, 1], -1)[None, :]
    px, py = pts[:, 0][:, None], pts[:, 1][:, None]
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    up = (ay <= py) & (by > py) & (cross > 0)
    down = (ay > py) & (by <= py) & (cross < 0)
    return np.sum(up, axis=1) - np.sum(down, axis=1)


def contains(curve, points):
    """Point-in-region test by winding number (boundary points excluded)."""
    pts = np.asarray(points, dtype=float)
    inside = winding_numbers(curve, pts) != 0
    return bool(inside[0]) if pts.ndim == 1 else inside


def distance_to_polyline(curve, points):
    """Euclidean distance from each point to the closed polyline.

    Returns the distances and the closest points.
    """
    x = curve.nodes
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = x[None, :, :]
    d = (np.roll(x, -1, axis=0) - x)[None, :, :]
    rel = pts[:, None, :] - a
    lam = np.clip(np.sum(rel * d, axis=2) / np.sum(d * d, axis=2), 0.0, 1.0)
    foot = a + lam[..., None] * d
    dist2 = np.sum((pts[:, None, :] - foot) ** 2, axis=2)
    j = np.argmin(dist2, axis=1)
    rows = np.arange(len(pts))
    return np.sqrt(dist2[rows, j]), foot[rows, j]


def hausdorff_distance(c1, c2):
    """Symmetric Hausdorff distance between two closed polylines.

    Vertices of each curve are measured against the other polyline, so two
    samplings of the same smooth curve are only as far apart as the chord
    sag, not the node offset.
    """
    d12, _ = distance_to_polyline(c2, c1.nodes)
    d21, _ = distance_to_polyline(c1, c2.nodes)
    return float(max(d12.max(), d21.max()))


def sign_identity_check(curve, field=None, window=0.05):
    """Check ``d/ds <e2, nu> = +-k`` where ``<e2, nu>`` nearly vanishes.

    At nodes with ``|<nu, e2>| < window`` the arc-length derivative of
    ``<nu, e2>`` (central difference on the nonuniform grid) is compared with
    ``<tangent, e2> * k``, which equals ``+-k`` exactly where ``<nu, e2> = 0``.
    Returns the maximum residual, 0 when no node lies in the window.
    """
    if field is None:
        field = curvature_field(curve)
    nu2 = field.nu[:, 1]
    sel = np.flatnonzero(np.abs(nu2) < window)
    if sel.size == 0:
        return 0.0
    h = curve.edge_lengths()
    h1 = np.roll(h, 1)[sel]
    h2 = h[sel]
    fm = np.roll(nu2, 1)[sel]
    fp = np.roll(nu2, -1)[sel]
    f0 = nu2[sel]
    deriv = (h1**2 * (fp - f0) + h2**2 * (f0 - fm)) / (h1 * h2 * (h1 + h2))
    # counterclockwise: tangent = (-nu2, nu1), so <tangent, e2> = nu1
    return float(np.max(np.abs(deriv - field.nu[sel, 0] * field.k[sel])))
