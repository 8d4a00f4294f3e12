import math

import numpy as np
import pytest

from imcf_torus import geometry as geo
from imcf_torus import scenarios as sc

from . import oracles


def node_at(n, phi):
    # make_round_torus places node j at angle -2 pi j / n
    return int(round((-phi % (2 * math.pi)) / (2 * math.pi) * n)) % n


# ---------------------------------------------------------------- curve type


def test_curve_rejects_bad_input():
    good = oracles.circle_nodes((0, 3), 1, 32)
    with pytest.raises(geo.CurveError):
        geo.GeneratingCurve(good[:10])
    with pytest.raises(geo.PinchError):
        geo.GeneratingCurve(good - [0, 3.5])
    dup = good.copy()
    dup[5] = dup[4]
    with pytest.raises(geo.CurveError, match="degenerate"):
        geo.GeneratingCurve(dup)
    with pytest.raises(geo.CurveError, match="clockwise"):
        geo.GeneratingCurve(good[::-1])
    assert np.array_equal(geo.GeneratingCurve(good[::-1], orient=True).nodes, good[::-1][::-1])


def test_curve_nodes_are_read_only():
    c = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1, 32))
    with pytest.raises(ValueError):
        c.nodes[0, 0] = 1.0


# ---------------------------------------------------------------- curvature


@pytest.mark.parametrize("n", [16, 100, 512])
@pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
def test_circle_curvature_is_inverse_radius(n, r):
    c = geo.GeneratingCurve(oracles.circle_nodes((0.0, 3.0), r, n))
    nu, k = geo.compute_normals_and_k(c)
    # exact stencil; the cross product loses about (r / h)^2 in roundoff
    np.testing.assert_allclose(k, 1.0 / r, rtol=1e-10)
    np.testing.assert_allclose(np.hypot(nu[:, 0], nu[:, 1]), 1.0, atol=1e-12)


def test_outward_normal_on_circle():
    x = oracles.circle_nodes((0.5, 3.0), 1.0, 64)
    nu, _ = geo.compute_normals_and_k(geo.GeneratingCurve(x))
    np.testing.assert_allclose(nu, x - [0.5, 3.0], atol=1e-13)


def test_rounded_square_is_convex():
    # superellipse |x|^4 + |y|^4 = 1, convex with flat-ish sides
    t = 2 * np.pi * np.arange(400) / 400
    c, s = np.cos(t), np.sin(t)
    x = np.sign(c) * np.abs(c) ** 0.5
    y = np.sign(s) * np.abs(s) ** 0.5
    _, k = geo.compute_normals_and_k(geo.GeneratingCurve(np.c_[x, 3 + y]))
    assert k.min() >= -1e-12


def ellipse_vertex_k_error(n):
    c = geo.GeneratingCurve(oracles.ellipse_nodes((0, 3), 2.0, 1.0, n))
    _, k = geo.compute_normals_and_k(c)
    return abs(k[0] - 2.0)


def test_ellipse_vertex_curvature():
    # a / b^2 at the end of the major axis
    e1, e2 = ellipse_vertex_k_error(256), ellipse_vertex_k_error(512)
    assert e2 < 1e-3
    assert 3.5 < e1 / e2 < 4.5


def test_torus_rotational_curvature(torus512, torus_field):
    n = len(torus512)
    assert torus_field.p[node_at(n, 0.0)] == pytest.approx(0.25, abs=1e-12)
    assert torus_field.p[node_at(n, math.pi / 2)] == pytest.approx(0.0, abs=1e-12)
    assert torus_field.p[node_at(n, math.pi)] == pytest.approx(-0.5, abs=1e-12)


def test_torus_mean_and_gauss(torus512, torus_field):
    n = len(torus512)
    assert torus_field.H[node_at(n, 0.0)] == pytest.approx(1.25, abs=1e-10)
    assert torus_field.H[node_at(n, math.pi)] == pytest.approx(0.5, abs=1e-10)
    assert torus_field.K[node_at(n, math.pi / 2)] == pytest.approx(0.0, abs=1e-12)
    # every node against the analytic torus
    phi = -2 * np.pi * np.arange(n) / n
    expected = np.array([oracles.torus_H(3, 1, f) for f in phi])
    np.testing.assert_allclose(torus_field.H, expected, atol=1e-11)


def test_curvature_identities_hold_exactly():
    c = sc.make_perturbed_torus(3, 1, [(2, 0.05), (3, 0.02, 0.3)], 300)
    f = geo.curvature_field(c)
    np.testing.assert_array_equal(f.H, f.k + f.p)
    np.testing.assert_array_equal(f.K, f.k * f.p)
    np.testing.assert_allclose(f.A2, f.H**2 - 2 * f.K, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(np.hypot(f.nu[:, 0], f.nu[:, 1]), 1.0, atol=1e-12)


def test_mean_and_gauss_arithmetic():
    H, K, A2 = geo.mean_and_gauss([1.0, 2.0], [0.25, -0.5])
    np.testing.assert_array_equal(H, [1.25, 1.5])
    np.testing.assert_array_equal(K, [0.25, -1.0])
    np.testing.assert_array_equal(A2, [1.0625, 4.25])


def ellipse_profile_errors(n):
    a, b, R = 1.0, 0.7, 3.0
    t = 2 * np.pi * np.arange(n) / n
    c = geo.GeneratingCurve(np.c_[a * np.cos(t), R + b * np.sin(t)])
    f = geo.curvature_field(c)
    speed = np.sqrt(a**2 * np.sin(t) ** 2 + b**2 * np.cos(t) ** 2)
    k = a * b / speed**3
    nu2 = a * np.sin(t) / speed
    p = nu2 / (R + b * np.sin(t))
    return (
        np.max(np.abs(f.k - k)),
        np.max(np.abs(f.p - p)),
        np.max(np.abs(f.H - (k + p))),
    )


def test_curvatures_converge_at_second_order():
    coarse = ellipse_profile_errors(128)
    fine = ellipse_profile_errors(256)
    for e1, e2 in zip(coarse, fine):
        assert 3.5 < e1 / e2 < 4.5


# ---------------------------------------------------------------- integrals


def test_torus_area_pappus(torus512):
    assert geo.surface_area(torus512) == pytest.approx(oracles.torus_area(3, 1), rel=1e-4)
    small = sc.make_round_torus(2.0, 0.5, 512)
    assert geo.surface_area(small) == pytest.approx(39.4784176, rel=1e-4)


@pytest.mark.parametrize("lam", [0.1, 3.7, 10.0])
def test_area_scales_quadratically(torus512, lam):
    a = geo.surface_area(torus512)
    assert geo.surface_area(torus512.scaled(lam)) == pytest.approx(lam**2 * a, rel=1e-14)


def test_area_is_second_order():
    exact = oracles.torus_area(3, 1)
    e = [abs(geo.surface_area(sc.make_round_torus(3, 1, n)) - exact) for n in (128, 256)]
    assert 3.9 < e[0] / e[1] < 4.1


def test_gauss_bonnet_tolerance_and_rate():
    coeffs = [(2, 0.05), (3, 0.02, 0.3)]
    res = []
    for n in (256, 512, 1024):
        c = sc.make_perturbed_torus(3, 1, coeffs, n)
        res.append(abs(geo.surface_integral(c, geo.curvature_field(c).K)))
    assert res[1] < 1e-2
    assert 3.5 < res[0] / res[1] < 4.5
    assert 3.5 < res[1] / res[2] < 4.5


def test_round_torus_gauss_bonnet_is_roundoff(torus512, torus_field):
    assert abs(geo.surface_integral(torus512, torus_field.K)) < 1e-12


# ---------------------------------------------------------------- splines


def test_spline_arc_length_of_circle():
    c = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1.0, 512))
    assert geo.arc_length(c, smooth=True) == pytest.approx(2 * math.pi, rel=1e-10)
    assert geo.arc_length(c) < 2 * math.pi


def test_spline_arclength_points_lie_on_circle():
    c = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1.0, 256))
    pts, L = geo.spline_arclength_points(c, fractions=np.linspace(0, 1, 50, endpoint=False))
    np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1] - 3), 1.0, atol=1e-9)
    ang = np.unwrap(np.arctan2(pts[:, 0], pts[:, 1] - 3))
    np.testing.assert_allclose(np.diff(ang), -2 * math.pi / 50, atol=1e-9)
    with pytest.raises(ValueError):
        geo.spline_arclength_points(c)


def test_refine_keeps_nodes():
    c = sc.make_round_torus(3, 1, 64)
    r = geo.refine(c, 4)
    assert len(r) == 256
    np.testing.assert_array_equal(r.nodes[::4], c.nodes)


# ---------------------------------------------------------------- graphs


def test_torus_decomposition(torus512):
    d = geo.decompose_graphs(torus512)
    assert d.a == pytest.approx(-1.0, abs=1e-12)
    assert d.b == pytest.approx(1.0, abs=1e-12)
    assert np.interp(0.0, d.grid, d.bottom) == pytest.approx(2.0, abs=1e-4)
    assert np.interp(0.0, d.grid, d.top) == pytest.approx(4.0, abs=1e-4)
    assert np.all(d.bottom < d.top)
    assert np.all(d.bottom_second_differences() >= -d.tol_convex())
    assert len(d.grid) == len(torus512)


def test_decomposition_partitions_nodes(torus512, torus_field):
    d = geo.decompose_graphs(torus512)
    ids = np.concatenate([d.bottom_node_ids, d.top_node_ids])
    assert sorted(ids.tolist()) == list(range(len(torus512)))
    nu2 = torus_field.nu[:, 1]
    assert np.all(nu2[d.bottom_node_ids] <= 1e-9)
    assert np.all(nu2[d.top_node_ids] >= -1e-9)


def test_symmetric_convex_curve_transitions_at_extremes():
    c = geo.GeneratingCurve(oracles.ellipse_nodes((0, 3), 1.5, 0.7, 200))
    d = geo.decompose_graphs(c)
    x = c.nodes[:, 0]
    assert d.bottom_path[0] == np.argmin(x) and d.bottom_path[-1] == np.argmax(x)
    assert d.top_path[0] == np.argmin(x) and d.top_path[-1] == np.argmax(x)


def test_perturbed_torus_bottom_graph_is_convex():
    c = sc.make_perturbed_torus(3, 1, [(2, 0.05)], 512)
    d = geo.decompose_graphs(c)
    assert np.all(d.bottom_second_differences() >= -d.tol_convex())
    assert np.all(d.bottom < d.top)


def test_dented_profile_violates_graph_structure():
    # upright peanut: the waist turns nu2 back up below each lobe
    phi = -2 * np.pi * np.arange(256) / 256
    rho = 1 + 0.4 * np.cos(2 * phi)
    c = geo.GeneratingCurve(np.c_[rho * np.sin(phi), 3 + rho * np.cos(phi)])
    with pytest.raises(geo.GraphStructureError):
        geo.decompose_graphs(c)


# ---------------------------------------------------------------- embeddedness


def test_circle_is_embedded(torus512):
    assert geo.is_embedded(torus512) == (True, None)


def test_figure_eight_reports_crossing():
    t = 2 * np.pi * np.arange(64) / 64 + 0.01
    x = np.c_[np.sin(2 * t), 3 + np.sin(t)]
    c = geo.GeneratingCurve(x, orient=True) if geo._shoelace(x) < 0 else geo.GeneratingCurve(x)
    ok, pair = geo.is_embedded(c)
    assert not ok
    i, j = pair
    n = len(c)
    assert oracles.segments_intersect(c.nodes[i], c.nodes[(i + 1) % n], c.nodes[j], c.nodes[(j + 1) % n])


def test_nested_graphs_agree_with_brute_force():
    # w < v over (-1, 1), closed through the endpoints
    x = np.linspace(-1, 1, 41)
    w = 2.0 + 0.5 * x**2
    v = 3.0 - 0.3 * x**2 + 0.05 * np.sin(7 * x)
    nodes = np.vstack([np.c_[x, w], np.c_[x[::-1], v[::-1]][1:-1]])
    c = geo.GeneratingCurve(nodes)
    assert geo.is_embedded(c)[0]
    assert oracles.brute_force_simple(c.nodes)


def test_touching_vertex_counts_as_intersection():
    # rectangle whose top vertex at x1 = 2 is pulled down exactly onto the bottom edge
    top = np.c_[np.linspace(4, 0, 17), np.full(17, 2.0)]
    top[8] = [2.0, 1.0]
    c = geo.GeneratingCurve(np.vstack([[[0, 1], [4, 1]], top]))
    assert not geo.is_embedded(c)[0]
    assert not oracles.brute_force_simple(c.nodes)


# ---------------------------------------------------------------- regions


def test_circle_region():
    c = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1.0, 4096))
    assert geo.enclosed_region_area(c) == pytest.approx(math.pi, rel=1e-5)
    assert geo.contains(c, (0.0, 3.0))
    assert not geo.contains(c, (0.0, 3 + 1.001))
    np.testing.assert_array_equal(geo.contains(c, [[0, 3], [0, 5]]), [True, False])
    reg = geo.enclosed_region(c)
    assert reg.area > 0 and reg.contains((0.2, 3.1))


def test_region_rejects_self_intersecting_curve():
    t = 2 * np.pi * np.arange(64) / 64 + 0.01
    x = np.c_[np.sin(2 * t), 3 + np.sin(t)]
    c = geo.GeneratingCurve(x, orient=True)
    with pytest.raises(geo.CurveError):
        geo.enclosed_region_area(c)


def test_hausdorff_distance():
    a = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1.0, 256))
    b = geo.GeneratingCurve(oracles.circle_nodes((0, 3), 1.1, 256))
    assert geo.hausdorff_distance(a, a) == 0.0
    assert geo.hausdorff_distance(a, b) == pytest.approx(0.1, rel=1e-3)
    assert geo.hausdorff_distance(a, b) == geo.hausdorff_distance(b, a)


# ---------------------------------------------------------------- sign identity


def test_sign_identity_on_torus(torus512):
    assert geo.sign_identity_check(torus512) < 1e-4


def test_sign_identity_converges():
    r = [geo.sign_identity_check(geo.GeneratingCurve(oracles.ellipse_nodes((0, 3), 1.3, 0.8, n)))
         for n in (128, 256)]
    assert 3.0 < r[0] / r[1] < 5.0


def test_sign_identity_window_skips_flat_nodes():
    # stadium: flat top and bottom (nu2 = +-1, k = 0) joined by half circles
    m = 40
    th = np.linspace(-np.pi / 2, np.pi / 2, m)
    right = np.c_[1 + np.cos(th), 3 + np.sin(th)]
    left = np.c_[-1 - np.cos(th), 3 - np.sin(th)]
    top = np.c_[np.linspace(1, -1, 12)[1:-1], np.full(10, 4.0)]
    bottom = np.c_[np.linspace(-1, 1, 12)[1:-1], np.full(10, 2.0)]
    c = geo.GeneratingCurve(np.vstack([right, top, left, bottom]))
    f = geo.curvature_field(c)
    flat = np.abs(f.nu[:, 1]) > 0.999
    assert flat.sum() >= 16
    assert geo.sign_identity_check(c, f) < 5e-3
    assert geo.sign_identity_check(c, f, window=1e-9) == 0.0
