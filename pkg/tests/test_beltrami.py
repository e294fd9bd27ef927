"""Beltrami solver: conformal case, closed-form oracle, residuals."""

import numpy as np
import pytest

from cylren.beltrami import (
    BeltramiProblem,
    hilbert_norm_bound,
    solve,
)
from cylren.errors import DegenerateGluingError
from cylren.polar_field import PolarField, default_radii


def _constant_mu(value, M=256, N=512, R=1.0):
    radii = default_radii(R, M)
    samples = np.full((M, N), value, dtype=complex)
    mu = PolarField.from_samples(samples, radii, R)
    return BeltramiProblem(mu)


def _disk_mu(k, center, rc, M=256, N=512, R=1.0):
    radii = default_radii(R, M)
    phis = 2.0 * np.pi * np.arange(N) / N
    z = radii[:, None] * np.exp(1j * phis[None, :])
    samples = np.where(np.abs(z - center) < rc, k, 0.0).astype(complex)
    mu = PolarField.from_samples(samples, radii, R)
    return BeltramiProblem(mu)


def test_zero_coefficient_gives_identity():
    sol = solve(_constant_mu(0.0, M=64, N=64))
    rng = np.random.default_rng(0)
    z = rng.uniform(0.05, 2.0, 50) * np.exp(
        1j * rng.uniform(-np.pi, np.pi, 50)
    )
    assert np.max(np.abs(sol.eval(z) - z)) < 1e-12
    assert len(sol.history) == 1


def test_normalization_pins_zero_and_one():
    sol = solve(_constant_mu(0.3))
    assert abs(sol.eval(0.0)) <= 1e-10
    assert abs(sol.eval(1.0) - 1.0) <= 1e-10


def test_constant_coefficient_residual_and_grid_refinement():
    # mu = 0.3 on the whole grid disk is resolved exactly by the mode scheme
    whole = solve(_constant_mu(0.3, M=128, N=256))
    assert whole.residual_report()["median"] <= 1e-2
    # an off-center disk is discretization-limited, so refining must help
    base = solve(_disk_mu(0.5, 0.3, 0.2, M=128, N=256))
    fine = solve(_disk_mu(0.5, 0.3, 0.2, M=256, N=512))
    r0 = base.residual_report()["median"]
    r1 = fine.residual_report()["median"]
    assert r0 <= 1e-2
    assert r1 <= max(r0 / 1.5, 1e-11)


def test_iteration_contracts():
    # the off-center disk converges slowly enough to expose the ratio
    prob = _disk_mu(0.7, 0.3, 0.2)
    sol = solve(prob)
    assert sol.converged
    h = sol.history
    cap = prob.K * hilbert_norm_bound(prob.p) + 0.1
    ratios = [h[i + 1] / h[i] for i in range(3, len(h) - 1)]
    assert ratios and max(ratios) <= cap


def test_off_center_disk_closed_form():
    # mu = k on the disk |z - c| < rc has the explicit solution
    #   g(z) = z + k conj(z - c) inside,  z + k rc^2/(z - c) outside,
    # continuous across the circle since conj(w) = rc^2/w on |w| = rc.
    k, c, rc = 0.5, 0.3, 0.2
    sol = solve(_disk_mu(k, c, rc))

    def oracle(z):
        inner = np.abs(z - c) < rc
        g = np.where(inner, z + k * np.conj(z - c), z + k * rc**2 / (z - c))
        g0 = 0.0 + k * rc**2 / (0.0 - c)
        g1 = 1.0 + k * rc**2 / (1.0 - c)
        return (g - g0) / (g1 - g0)

    rng = np.random.default_rng(1)
    inside = c + 0.5 * rc * np.exp(1j * rng.uniform(-np.pi, np.pi, 30))
    outside = 0.8 * np.exp(1j * rng.uniform(-np.pi, np.pi, 30))
    far = np.array([1.5, -2.0 + 1.0j])
    for pts in (inside, outside, far):
        assert np.max(np.abs(sol.eval(pts) - oracle(pts))) < 2e-3


def test_conformality_off_support():
    sol = solve(_disk_mu(0.5, 0.3, 0.2))
    assert sol.conformality_off_support() <= 1e-2


def test_inverse_round_trip():
    sol = solve(_disk_mu(0.5, 0.3, 0.2))
    rng = np.random.default_rng(2)
    z = rng.uniform(0.1, 0.9, 100) * np.exp(
        1j * rng.uniform(-np.pi, np.pi, 100)
    )
    w = sol.eval(z)
    back = sol.eval_inverse(w)
    assert np.max(np.abs(back - z)) < 1e-9


def test_large_coefficient_rejected():
    with pytest.raises(DegenerateGluingError):
        _constant_mu(0.995, M=32, N=32)


def test_norm_bound_constant():
    # cot^2(pi/8) at p = 4
    assert abs(hilbert_norm_bound(4.0) - 1.0 / np.tan(np.pi / 8.0) ** 2) < 1e-14
    assert hilbert_norm_bound(2.0) == pytest.approx(1.0)
