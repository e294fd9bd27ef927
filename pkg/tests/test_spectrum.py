"""Linearization matrix, eigenvalue solvers, and spectral-radius bound."""

import math

import numpy as np
import pytest

from cylren import spectrum
from cylren.analytic_map import basis_to_map, reference_fixed_point
from cylren.errors import SpectrumError
from cylren.spectrum import (
    BoundConstants,
    LinearizationMatrix,
    REFERENCE_A6,
    binomial_constant,
    build_matrix,
    char_poly_eigenvalues,
    fd_column,
    induced_norm,
    leading_eigenvalue,
    rsp_bound,
    spectral_radius,
)


def _random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


# -- eigenvalue machinery ----------------------------------------------------


def test_reference_matrix_spectral_radius():
    assert spectral_radius(REFERENCE_A6) == pytest.approx(0.53, abs=0.01)


def test_power_iteration_matches_char_poly():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 8):
        M = _random_matrix(rng, n)
        lam = leading_eigenvalue(M)
        roots = char_poly_eigenvalues(M)
        target = roots[np.argmax(np.abs(roots))]
        assert abs(lam - target) < 1e-8 * max(abs(target), 1.0)


def test_leading_eigenvalue_diagonal_and_scalar():
    lam = leading_eigenvalue(np.diag([0.2, 0.5j]))
    assert abs(lam - 0.5j) < 1e-10
    assert leading_eigenvalue(np.array([[0.3 - 0.1j]])) == 0.3 - 0.1j
    with pytest.raises(ValueError):
        leading_eigenvalue(np.zeros((2, 3)))


def test_induced_norm_is_max_column_sum():
    M = np.array([[1.0, -2.0j], [3.0, 0.5]])
    assert induced_norm(M) == pytest.approx(4.0)
    rng = np.random.default_rng(1)
    M = _random_matrix(rng, 6)
    assert spectral_radius(M) <= induced_norm(M) + 1e-12


# -- the bound ---------------------------------------------------------------


def test_bound_reduces_to_power_norm_without_defect():
    bc = BoundConstants(gamma=1e-6, delta=0.0, C=5.0, k=12)
    assert rsp_bound(bc) == pytest.approx((1e-6) ** (1.0 / 12))


def test_bound_is_monotone():
    base = rsp_bound(BoundConstants(1e-8, 1e-6, 2.0, 20))
    assert rsp_bound(BoundConstants(2e-8, 1e-6, 2.0, 20)) >= base
    assert rsp_bound(BoundConstants(1e-8, 2e-6, 2.0, 20)) >= base
    assert rsp_bound(BoundConstants(1e-8, 1e-6, 4.0, 20)) >= base


def test_bound_equals_kth_root_of_sum():
    # gamma^(1/k) (1 + C delta / gamma)^(1/k) = (gamma + C delta)^(1/k)
    g, d, C, k = 3e-7, 1e-4, 0.8, 15
    assert rsp_bound(BoundConstants(g, d, C, k)) == pytest.approx(
        (g + C * d) ** (1.0 / k)
    )


def test_bound_with_published_constants():
    bc = BoundConstants(gamma=2.07e-18, delta=0.24, C=8.4e-6, k=80)
    val = rsp_bound(bc)
    assert 0.84 < val < 0.86


def test_binomial_constant_identity_closed_form():
    # for A = I: C = sum_i C(k,i) delta^(i-1) = ((1+delta)^k - 1)/delta
    k, d = 10, 0.1
    C = binomial_constant(np.eye(3), d, k)
    assert C == pytest.approx(((1.0 + d) ** k - 1.0) / d, rel=1e-12)
    # delta = 0 keeps only the i = 1 term, k ||A^(k-1)||
    assert binomial_constant(np.eye(3), 0.0, k) == pytest.approx(float(k))
    lam = 0.5
    got = binomial_constant(lam * np.eye(2), 0.0, k)
    assert got == pytest.approx(k * lam ** (k - 1), rel=1e-12)


def test_constants_validate_ranges():
    with pytest.raises(ValueError):
        BoundConstants(gamma=1.5, delta=0.0, C=1.0, k=10)
    with pytest.raises(ValueError):
        BoundConstants(gamma=0.5, delta=1.0, C=1.0, k=10)
    bc = BoundConstants(0.5, 0.1, 1.0, 10, C1=0.2, C2=0.1, tail_factor=0.01)
    d = bc.to_dict()
    assert d["C1"] == 0.2 and d["tail_factor"] == 0.01


def test_tail_compactness_factor_value():
    assert (2.266 / 3.0) ** 15 == pytest.approx(0.014862, abs=5e-6)


# -- matrix container --------------------------------------------------------


def test_matrix_save_load_submatrix(tmp_path):
    rng = np.random.default_rng(2)
    M = LinearizationMatrix(6, 0.01, _random_matrix(rng, 5), {"note": "x"})
    path = tmp_path / "mat.json"
    M.save(path)
    back = LinearizationMatrix.load(path)
    assert back.N == 6 and back.eps == 0.01
    assert np.array_equal(back.entries, M.entries)
    assert back.metadata == {"note": "x"}
    sub = back.submatrix(4)
    assert np.array_equal(sub.entries, M.entries[:3, :3])
    with pytest.raises(ValueError):
        back.submatrix(7)


def test_matrix_rejects_bad_entries():
    with pytest.raises(ValueError):
        LinearizationMatrix(4, 0.01, np.zeros((2, 3)))
    bad = np.zeros((3, 3), dtype=complex)
    bad[1, 1] = np.nan
    with pytest.raises(SpectrumError):
        LinearizationMatrix(4, 0.01, bad)


# -- finite differences against an exactly linear operator -------------------


_FAKE_DIM = 10


def _fake_renorm_factory(M):
    def fake(f, cfg):
        coeffs, _ = f.basis_expand()
        c = np.zeros(_FAKE_DIM, dtype=complex)
        c[: min(coeffs.size, _FAKE_DIM)] = coeffs[:_FAKE_DIM]
        return basis_to_map(M @ c, f.rho)

    return fake


def test_fd_column_exact_for_linear_operator(monkeypatch):
    rng = np.random.default_rng(3)
    M = _random_matrix(rng, _FAKE_DIM) * 0.1
    monkeypatch.setattr(spectrum, "_renorm", _fake_renorm_factory(M))
    fhat = reference_fixed_point()
    for j, eps in ((2, 0.01), (5, 0.003)):
        col = fd_column(fhat, j, eps)
        want = M[:, j - 1]
        assert np.max(np.abs(col[:_FAKE_DIM] - want)) < 1e-7


def test_build_matrix_recovers_linear_part(monkeypatch):
    rng = np.random.default_rng(4)
    M = _random_matrix(rng, _FAKE_DIM) * 0.1
    monkeypatch.setattr(spectrum, "_renorm", _fake_renorm_factory(M))
    fhat = reference_fixed_point()
    N = 6
    mat = build_matrix(fhat, N, eps=0.01)
    assert np.max(np.abs(mat.entries - M[1:N, 1:N])) < 1e-7
    assert mat.metadata["input_degree"] == fhat.degree


def test_fd_column_validates_arguments():
    fhat = reference_fixed_point()
    with pytest.raises(ValueError):
        fd_column(fhat, 1, 0.01)
    with pytest.raises(ValueError):
        fd_column(fhat, 3, 0.5)


def test_unstable_probe_rejects_stable_direction():
    from cylren.analytic_map import AnalyticMap
    from cylren.spectrum import unstable_direction_probe

    fhat = reference_fixed_point()
    v = AnalyticMap([0.0, 1.0], fhat.rho)  # v'(0) = 0
    with pytest.raises(ValueError):
        unstable_direction_probe(fhat, 0.01, v=v)


def test_power_norm_logs_are_submultiplicative():
    rng = np.random.default_rng(5)
    M = _random_matrix(rng, 4) * 0.4
    logs = spectrum._log_power_norms(M, 12)
    n1 = math.log(induced_norm(M))
    for m in range(1, 13):
        assert logs[m] <= m * n1 + 1e-9
