"""One renormalization step: extraction, invariances, and robustness."""

import numpy as np
import pytest

from conftest import cached_renorm
from cylren.analytic_map import AnalyticMap, SIEGEL_MULTIPLIER
from cylren.errors import CylrenError
from cylren.renorm import (
    RenormConfig,
    _cauchy_coefficients,
    _winding_number,
    conjugate_map,
    critical_point,
    critically_normalize,
    iterate_fixed_point,
    project_stable,
)


# -- contour extraction ------------------------------------------------------


def test_cauchy_coefficients_recover_polynomial():
    # the midpoint polygon rule carries an O(N^-2) bias; check the value at
    # the production resolution and the second-order decay under refinement
    want = np.array([0.0, 2.0, 1.0, 0.0, 0.0])
    errs = []
    for n in (512, 1024):
        x = 0.3 * np.exp(1j * _angles(n))
        y = x**2 + 2.0 * x
        errs.append(np.max(np.abs(_cauchy_coefficients(x, y, 5) - want)))
    assert errs[0] < 1e-4
    assert errs[1] < errs[0] / 3.5


def test_cauchy_coefficients_on_identity_contour():
    x = 0.11 * np.exp(1j * _angles(256))
    c = _cauchy_coefficients(x, x, 3)
    assert abs(c[0]) < 1e-14
    assert abs(c[1] - 1.0) < 1e-3


def _angles(n):
    return -np.pi + (np.arange(n) + 0.5) * 2.0 * np.pi / n


def test_winding_number():
    t = _angles(200)
    assert _winding_number(0.5 * np.exp(1j * t)) == 1
    assert _winding_number(0.5 * np.exp(-1j * t)) == -1
    assert _winding_number(3.0 + 0.5 * np.exp(1j * t)) == 0


# -- conjugation and normalization ------------------------------------------


def test_conjugation_fixes_multiplier_and_scales_critical_point():
    f = AnalyticMap([SIEGEL_MULTIPLIER, 0.4 + 0.1j, -0.05j], 2.266)
    s = 0.7 - 0.3j
    g = conjugate_map(f, s)
    assert g.coeffs[0] == f.coeffs[0]
    assert abs(critical_point(g) - critical_point(f) / s) < 1e-12
    z = 0.2 + 0.1j
    assert abs(g.eval(z) - f.eval(s * z) / s) < 1e-14


def test_critical_normalization_puts_critical_point_at_one(fhat):
    g = critically_normalize(conjugate_map(fhat, 0.8 + 0.2j))
    assert abs(g.deriv(1.0)) < 1e-10


# -- one step at the reference map ------------------------------------------


def test_step_diagnostics_at_reference(renorm_base, cfg):
    d = renorm_base.diagnostics
    assert set(d["return_counts"]) <= {2, 3}
    assert d["c0_abs"] < cfg.c0_tol
    assert d["solver_K"] < 0.99
    assert d["orbit_max"] < cfg.rho_in


def test_step_output_is_critically_normalized(renorm_base):
    out = renorm_base.map_out
    assert abs(out.deriv(1.0)) < 1e-8
    # the multiplier of the renormalized germ stays near the golden rotation
    assert abs(out.c(1) - SIEGEL_MULTIPLIER) < 0.01


def test_projection_after_step_is_idempotent(renorm_base):
    p1 = project_stable(renorm_base.map_out)
    p2 = project_stable(p1)
    assert np.array_equal(p1.coeffs, p2.coeffs)
    assert p1.c(1) == SIEGEL_MULTIPLIER


# -- robustness to method knobs ---------------------------------------------


def _germ(res, n=6):
    return res.map_out.coeffs[1:n]


def test_step_is_stable_under_knob_changes(fhat, cfg, renorm_base):
    # discretization error scale: bump the solver grids
    fine = cached_renorm(
        "renorm_fine", fhat,
        RenormConfig(n_radii=384, n_contour=2048),
    )
    disc = np.max(np.abs(_germ(fine) - _germ(renorm_base)))
    # slope 1.1 -> 1.2 must stay within a few discretization errors
    slop = cached_renorm("renorm_slope12", fhat, RenormConfig(slope=1.2))
    assert np.max(np.abs(_germ(slop) - _germ(renorm_base))) <= 5.0 * disc
    # contour radius -20% likewise
    cont = cached_renorm(
        "renorm_contour09", fhat, RenormConfig(contour_radius=0.09)
    )
    assert np.max(np.abs(_germ(cont) - _germ(renorm_base))) <= 10.0 * disc


# -- iteration scaffolding ---------------------------------------------------


def test_zero_iterations_return_empty(fhat, cfg):
    assert iterate_fixed_point(fhat, 0, cfg) == []


def test_config_validation_and_round_trip():
    with pytest.raises(ValueError):
        RenormConfig(rho_in=3.0, rho_out=2.0)
    cfg = RenormConfig()
    d = cfg.to_dict()
    assert d["slope"] == 1.1 and d["out_degree"] == 17
    assert RenormConfig(**d).to_dict() == d


def test_degenerate_map_raises():
    f = AnalyticMap([SIEGEL_MULTIPLIER], 2.266)  # linear: no critical point
    with pytest.raises(CylrenError):
        critically_normalize(f)
