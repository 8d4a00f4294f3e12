import math

import numpy as np
import pytest

from imcf_torus import diagnostics as diag
from imcf_torus import geometry as geo
from imcf_torus import rescale as rs
from imcf_torus import scenarios as sc

from . import oracles


def torus_band(R=3.0, r=1.0, n=512, scale=1.0):
    c = sc.make_round_torus(R, r, n)
    if scale != 1.0:
        c = geo.GeneratingCurve(c.nodes * scale)
    ref = diag.reference_data(c)
    dec = geo.decompose_graphs(c)
    return c, diag.build_band(c, dec, ref.a)


def test_rescaled_torus_band_is_normalized():
    c, band = torus_band()
    rb = rs.rescale_band(band, c)
    mid = len(rb) // 2
    assert rb.x[mid] == 0.0
    assert rb.w_tilde[mid] == pytest.approx(1.0, abs=1e-12)
    assert np.all(rb.w_tilde >= 1.0 - 1e-12)
    assert rb.u_min == pytest.approx(2.0, abs=1e-7)
    assert rb.a_tilde == pytest.approx(0.25, rel=1e-7)
    assert len(rb) == 2 * len(band.node_ids) + 1
    # the bottom arc of the unit circle about (0, 3), rescaled by 1/2
    exact = (3.0 - np.sqrt(1.0 - (2 * rb.x) ** 2)) / 2
    np.testing.assert_allclose(rb.w_tilde, exact, atol=1e-8)


@pytest.mark.parametrize("lam", [0.1, 10.0])
def test_rescaling_removes_scale(lam):
    c, band = torus_band()
    base = rs.rescale_band(band, c)
    c2, band2 = torus_band(scale=lam)
    other = rs.rescale_band(band2, c2)
    assert other.u_min == pytest.approx(lam * base.u_min, rel=1e-12)
    np.testing.assert_allclose(other.x, base.x, rtol=0, atol=1e-12)
    np.testing.assert_allclose(other.w_tilde, base.w_tilde, rtol=0, atol=1e-12)
    np.testing.assert_allclose(other.w_prime, base.w_prime, rtol=0, atol=1e-10)


def test_rescale_graph_errors():
    x = np.linspace(-1, 1, 21)
    with pytest.raises(geo.PinchError):
        rs.rescale_graph(x, x**2 - 0.1)
    with pytest.raises(ValueError):
        rs.rescale_graph(x, 1 + x**2, a=1.5)
    with pytest.raises(ValueError):
        rs.rescale_graph(x[::-1], 1 + x**2)
    with pytest.raises(ValueError):
        rs.rescale_graph(x[:4], 1 + x[:4] ** 2)


def test_rescale_finds_off_grid_minimum():
    x = np.linspace(-2, 2, 401)
    rb = rs.rescale_graph(x, 0.5 + (x - 0.1234) ** 2, a=1.5)
    assert rb.center == pytest.approx(0.1234, abs=1e-12)
    assert rb.u_min == pytest.approx(0.5, abs=1e-12)


def test_cosh_is_recovered():
    s = sc.make_catenary_band(3.0, 4096)
    rb = rs.rescale_graph(s.x, s.w)
    dev = rs.catenary_deviation(rb)
    assert dev.x0 == pytest.approx(1.5, rel=1e-12)
    assert dev.w < 1e-9
    assert dev.w_prime < 1e-6
    assert dev.w_second < 1e-4
    assert dev.gamma == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("sigma", [0.5, 0.1, 0.01])
def test_shrinking_neck(sigma):
    # sigma cosh(x / sigma): the neck of a catenoid of waist sigma
    x = np.linspace(-2, 2, 4001) * sigma
    rb = rs.rescale_graph(x, sigma * np.cosh(x / sigma))
    assert rb.u_min == pytest.approx(sigma, rel=1e-10)
    assert rs.catenary_deviation(rb, 1.5).w < 1e-9


def test_gamma_fit():
    s = sc.make_catenary_band(1.0, 2001, gamma=2.0)
    rb = rs.RescaledBand.from_samples(s.x, s.w)
    dev = rs.catenary_deviation(rb, 1.0)
    assert dev.gamma == pytest.approx(2.0, abs=1e-7)
    # the sup-norm misfit is not smooth in gamma; residual tracks the gamma error
    assert dev.gamma_residual < 1e-7
    assert dev.w == pytest.approx(float(np.max(np.abs(s.w - np.cosh(s.x)))), rel=1e-12)


def test_window_beyond_band():
    s = sc.make_catenary_band(1.0, 101)
    rb = rs.rescale_graph(s.x, s.w)
    with pytest.raises(ValueError, match="exceeds"):
        rs.catenary_deviation(rb, 2.0)


def test_mean_curvature_of_catenary_vanishes():
    s = sc.make_catenary_band(3.0, 4097)
    H = rs.graph_mean_curvature(s.x, s.w)
    assert np.max(np.abs(H)) < 1e-4


def test_mean_curvature_of_cylinder():
    x = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(rs.graph_mean_curvature(x, np.full_like(x, 2.0)), -0.5, atol=1e-14)


def test_mean_curvature_of_torus_bottom():
    x = np.sort(np.r_[np.linspace(-0.6, 0.6, 601), 0.001])  # nonuniform
    w = 3 - np.sqrt(1 - x**2)
    H = rs.graph_mean_curvature(x, w)
    phi = np.pi - np.arcsin(x)
    exact = np.array([oracles.torus_H(3, 1, p) for p in phi])
    np.testing.assert_allclose(H, exact, atol=1e-4)


def test_rescaled_mean_curvature_matches_profile():
    c, band = torus_band()
    rb = rs.rescale_band(band, c)
    Ht = rs.graph_mean_curvature(rb.x, rb.w_tilde)
    fld = geo.curvature_field(c)
    xs = c.nodes[band.node_ids, 0]
    Hn = np.interp(xs, rb.center + rb.u_min * rb.x, Ht) / rb.u_min
    np.testing.assert_allclose(Hn, fld.H[band.node_ids], atol=1e-4)


@pytest.mark.parametrize("x0", [0.5, 1.0, 3.0])
def test_contradiction_integral_on_cosh(x0):
    s = sc.make_catenary_band(x0, 4096)
    val = rs.contradiction_integral(s.x, s.w)
    # w''/(1 + w'^2)^(3/2) = sech^2
    assert val == pytest.approx(4 * math.pi * math.tanh(x0), rel=1e-6)


def test_contradiction_integral_tends_to_four_pi():
    x0s = (2.0, 4.0, 6.0)
    vals = [rs.contradiction_integral(*sc.make_catenary_band(x0, 8192)[:2]) for x0 in x0s]
    gaps = [4 * math.pi - v for v in vals]
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[2] < 2e-4
    for x0, v in zip(x0s, vals):
        assert v == pytest.approx(4 * math.pi * math.tanh(x0), rel=1e-6)


def test_contradiction_integral_windows():
    s = sc.make_catenary_band(2.0, 4001)
    full = rs.contradiction_integral(s.x, s.w)
    assert rs.contradiction_integral(s.x, s.w, 2.0) == pytest.approx(full, rel=1e-14)
    assert rs.contradiction_integral(s.x, s.w, (0.0, 2.0)) == pytest.approx(full / 2, rel=1e-9)
    assert rs.contradiction_integral(s.x, s.w, 1.0) == pytest.approx(4 * math.pi * math.tanh(1.0), rel=1e-6)
    assert rs.contradiction_integral(s.x, s.w, (0.5, 0.5)) == 0.0
    assert rs.contradiction_integral(s.x, s.w, 0.0) == 0.0
    with pytest.raises(ValueError):
        rs.contradiction_integral(s.x, s.w, 2.5)


def test_contradiction_integral_is_scale_free():
    x = np.linspace(-1, 1, 1001)
    w = 2 + x**2
    v = rs.contradiction_integral(x, w)
    for lam in (0.1, 10.0):
        assert rs.contradiction_integral(lam * x, lam * w) == pytest.approx(v, rel=1e-10)


def test_contradiction_matches_band_integral():
    # the rescaled band carries the same total curvature as the original band
    c, band = torus_band(n=1024)
    bi = diag.band_gauss_integral(band, c).value
    rb = rs.rescale_band(band, c)
    ci = rs.contradiction_integral(rb.x, rb.w_tilde)
    assert ci == pytest.approx(bi, rel=1e-4)
    assert ci == pytest.approx(2 * math.pi, rel=1e-4)
