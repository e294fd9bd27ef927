"""Fundamental crescent geometry: anchors, coordinate, gluing, returns."""

import numpy as np
import pytest

from cylren.crescent import build_crescent
from cylren.errors import CrescentError


@pytest.fixture(scope="module")
def crescent(fhat):
    return build_crescent(fhat)


def test_anchor_normalization(crescent):
    # tau(0) is the third critical orbit point, tau^-1 of the fourth has
    # unit modulus, and the induced translation points to the right
    assert abs(crescent.tau_inverse(crescent.f3)) <= 1e-10
    xi4 = crescent.strip_translation
    assert abs(abs(xi4) - 1.0) <= 1e-10
    assert xi4.real > abs(xi4.imag)


def test_deck_transformation(crescent):
    assert 0.0 < crescent.alpha < 2.0 * np.pi
    # branch spacing must exceed the strip width for injectivity
    assert crescent.deck_shift > crescent.strip_translation.real
    xi = np.array([0.2 + 0.1j, -0.3 + 0.8j, 1.0 - 0.4j])
    lhs = crescent.tau(xi + crescent.deck_shift)
    assert np.max(np.abs(lhs - crescent.tau(xi))) < 1e-12


def test_tau_round_trip(crescent):
    xi = np.array([0.1 + 0.2j, 0.4 - 0.3j, -0.2 + 1.0j])
    z = crescent.tau(xi)
    back = crescent.tau_inverse_near(z, xi)
    assert np.max(np.abs(back - xi)) < 1e-12


def test_tau_inverse_derivative(crescent):
    z = np.array([0.5 + 0.3j, -0.4 + 0.6j, 1.2 - 0.2j])
    h = 1e-7
    fd = (crescent.tau_inverse(z + h) - crescent.tau_inverse(z - h)) / (2 * h)
    exact = crescent.tau_inverse_deriv(z)
    assert np.max(np.abs(fd - exact) / np.abs(exact)) < 1e-6


def test_boundary_endpoints_and_switch(crescent):
    assert abs(crescent.boundary_point(0.0)) <= 1e-12
    assert abs(crescent.boundary_point(1e14) - crescent.a) < 1e-5
    assert abs(crescent.boundary_point(crescent.r_switch) - crescent.f4) < 1e-10


def test_boundary_joint_is_tangent(crescent):
    # the two parabolas meet at f^4(1) with matching tangent directions
    rs = crescent.r_switch
    lo = crescent.boundary_deriv(rs * (1.0 - 1e-9))
    hi = crescent.boundary_deriv(rs * (1.0 + 1e-9))
    cross = lo.real * hi.imag - lo.imag * hi.real
    assert abs(cross) < 1e-6 * abs(lo) * abs(hi)


def test_preimage_curve_is_f_preimage(crescent):
    rs = np.geomspace(1e-3, 1e3, 40)
    w = crescent.finv_boundary(rs)
    lam = crescent.boundary_point(rs)
    scale = np.maximum(np.abs(lam), 1.0)
    assert np.max(np.abs(crescent.f.eval(w) - lam) / scale) < 1e-10
    assert abs(crescent.finv_boundary(crescent.r_switch) - crescent.f3) < 1e-8


def test_strip_map_hits_boundary_curves(crescent):
    rs = np.array([0.05, 0.5, 5.0])
    A, B = crescent.strip_curves(rs)
    # phi = 0 carries weight 1 (the preimage-side curve A)
    at_one = crescent.strip_map(rs, np.zeros(3))
    assert np.max(np.abs(at_one - A)) < 1e-12
    # a small positive angle is close to the arc-side curve B
    at_eps = crescent.strip_map(rs, np.full(3, 1e-8))
    assert np.max(np.abs(at_eps - B)) < 1e-4


def test_strip_map_inverse_round_trip(crescent):
    rng = np.random.default_rng(0)
    r = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), 50))
    phi = rng.uniform(-np.pi * 0.999, np.pi, 50)
    xi = crescent.strip_map(r, phi)
    z, ok = crescent.strip_map_inverse(xi)
    assert np.all(ok)
    back = crescent.strip_map(np.abs(z), np.angle(z))
    assert np.max(np.abs(back - xi)) < 1e-8


def test_interior_points_belong_and_return(crescent):
    # midway between the boundary curves, points lie in the crescent and
    # first-return under f in 2 or 3 iterates
    r = np.geomspace(0.02, 0.35, 12)
    xi = crescent.strip_map(r, np.full(r.size, np.pi))
    z = crescent.tau(xi)
    assert np.all(crescent.contains(z))
    _, counts, _ = crescent.return_map_many(z)
    assert set(np.unique(counts)) <= {2, 3}


def test_return_map_rejects_outside_point(crescent):
    with pytest.raises(CrescentError):
        crescent.return_map(5.0 + 5.0j)


def test_beltrami_datum_is_uniformly_elliptic(crescent):
    radii = np.geomspace(1e-3, 1e3, 160)
    phis = 2.0 * np.pi * np.arange(64) / 64.0
    mu = crescent.beltrami_samples(radii, phis)
    assert np.all(np.isfinite(mu))
    assert np.nanmax(np.abs(mu)) < 0.99


def test_contour_dump(tmp_path, crescent):
    path = tmp_path / "contours.csv"
    crescent.dump_contours_csv(path, n=50)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("#")
    assert len(lines) == 1 + 4 * 50
    label, t, re, im = lines[1].split(",")
    assert label.strip() == "boundary"
    float(t), float(re), float(im)
