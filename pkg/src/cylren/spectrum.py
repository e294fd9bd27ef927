"""Finite-difference linearization of the renormalization and spectral bounds.

The differential at the fixed point is probed by finite differences along the
critically-normalized basis directions e_2..e_N, assembled into the matrix
A_N = P_N L P_N over the stable slice.  The spectral radius of the full
differential is then bounded by

    R_sp <= gamma^(1/k) (1 + C delta / gamma)^(1/k),

where gamma bounds ||A^k||, delta bounds the finite-rank defect ||L - A||
(estimated on probe vectors with the (rho/rho')^(N+1) compactness factor),
and C is a binomial sum over powers of A.  All large/small quantities are
handled in log space.
"""

from __future__ import annotations

import json
import math

import numpy as np

from cylren.analytic_map import AnalyticMap, basis_map
from cylren.errors import CylrenError, SpectrumError
from cylren.renorm import (
    RenormConfig,
    project_stable,
    renormalize_once,
    renormalize_robust,
)

# Linearization matrix at the golden fixed point for N = 6, computed
# independently at five-decimal precision; used as a cross-check target.
REFERENCE_A6 = np.array([
    [0.45879 - 0.97624j, 0.68789 - 0.46254j, 0.11338 - 0.09738j,
     0.13041 + 0.07490j, 0.15824 + 0.11616j],
    [-0.13666 + 1.72834j, -0.64474 + 0.54306j, 0.33937 - 0.50837j,
     0.14710 - 0.13849j, -0.21006 + 0.02552j],
    [-0.90634 - 1.37322j, 0.27155 - 0.38270j, -0.05765 + 1.09081j,
     -0.22948 + 0.14700j, 0.18338 - 0.39078j],
    [1.23970 + 0.20634j, -0.08549 + 0.23219j, -0.68227 - 0.81153j,
     0.12817 - 0.14685j, 0.10981 + 0.47861j],
    [-0.63443 + 0.58168j, -0.02489 - 0.18893j, 0.80205 + 0.00357j,
     -0.04014 + 0.12864j, -0.34685 - 0.19936j],
])

# Reference leading eigenvalue of the linearization as N grows.
REFERENCE_LEADING = 0.15 + 0.56j


class LinearizationMatrix:
    """Finite-difference approximation of the differential on the slice."""

    def __init__(self, N, eps, entries, metadata=None):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (N - 1, N - 1):
            raise ValueError("entries must be an (N-1) x (N-1) matrix")
        if not np.all(np.isfinite(entries)):
            raise SpectrumError("linearization matrix has non-finite entries")
        self.N = int(N)
        self.eps = float(eps)
        self.entries = entries
        self.metadata = dict(metadata or {})

    def submatrix(self, N):
        """The matrix truncated to directions e_2..e_N (rows are shared)."""
        if N > self.N:
            raise ValueError("cannot enlarge a linearization matrix")
        return LinearizationMatrix(
            N, self.eps, self.entries[: N - 1, : N - 1], self.metadata
        )

    def to_json_dict(self):
        return {
            "N": self.N,
            "eps": self.eps,
            "entries": [
                [[z.real, z.imag] for z in row] for row in self.entries
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, data):
        entries = np.array(
            [[complex(re, im) for re, im in row] for row in data["entries"]]
        )
        return cls(data["N"], data["eps"], entries, data.get("metadata"))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


class BoundConstants:
    """Inputs of the spectral-radius bound."""

    def __init__(self, gamma, delta, C, k, C1=None, C2=None, tail_factor=None):
        if not 0 < gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 <= delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        self.gamma = float(gamma)
        self.delta = float(delta)
        self.C = float(C)
        self.k = int(k)
        self.C1 = None if C1 is None else float(C1)
        self.C2 = None if C2 is None else float(C2)
        self.tail_factor = None if tail_factor is None else float(tail_factor)

    def to_dict(self):
        return {
            "gamma": self.gamma, "delta": self.delta, "C": self.C,
            "k": self.k, "C1": self.C1, "C2": self.C2,
            "tail_factor": self.tail_factor,
        }


# -- renormalization probes -------------------------------------------------


def _renorm(f, cfg):
    """Renormalize f, falling back across conjugate representatives."""
    try:
        return project_stable(renormalize_once(f, cfg).map_out)
    except CylrenError:
        return project_stable(renormalize_robust(f, cfg).map_out)


def _base_image(fhat, cfg):
    return _renorm(fhat, cfg)


def fd_column(fhat, j, eps, cfg=None, base=None):
    """e-basis coefficients of (R(fhat + eps e_j) - R(fhat)) / eps.

    The stable-slice projection is applied to both images, so the column
    lives on the slice (its e_1 component vanishes identically).
    """
    if j < 2:
        raise ValueError("columns are indexed by slice directions j >= 2")
    if not 0 < eps <= 0.1:
        raise ValueError("finite-difference step must lie in (0, 0.1]")
    cfg = cfg or RenormConfig()
    if base is None:
        base = _base_image(fhat, cfg)
    pert = _renorm(fhat + eps * basis_map(j, fhat.rho), cfg)
    diff = (pert - base) * (1.0 / eps)
    coeffs, _spill = diff.basis_expand()
    return coeffs


def _column_task(task):
    fhat, j, eps, cfg, base = task
    return fd_column(fhat, j, eps, cfg, base=base)


def build_matrix(fhat, N, eps=0.01, cfg=None, base=None, progress=None,
                 jobs=1):
    """Assemble A_N from the finite-difference columns j = 2..N.

    Columns are independent renormalization runs; jobs > 1 distributes them
    over worker processes and assembles in fixed j order.
    """
    cfg = cfg or RenormConfig()
    if base is None:
        base = _base_image(fhat, cfg)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [(fhat, j, eps, cfg, base) for j in range(2, N + 1)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            raw = list(ex.map(_column_task, tasks))
    else:
        raw = [fd_column(fhat, j, eps, cfg, base=base)
               for j in range(2, N + 1)]
    cols = []
    for idx, col in enumerate(raw):
        col = col[1:N] if col.size >= N else np.concatenate(
            [col[1:], np.zeros(N - col.size, dtype=complex)]
        )
        cols.append(col)
        if progress is not None:
            progress(idx + 2, N)
    entries = np.column_stack(cols)
    meta = {"eps": eps, "config": cfg.to_dict(),
            "input_degree": fhat.degree, "rho": fhat.rho}
    return LinearizationMatrix(N, eps, entries, meta)


# -- eigenvalues ------------------------------------------------------------


def induced_norm(M):
    """Norm induced by the l1 coefficient norm: max column sum."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return float(np.max(np.sum(np.abs(M), axis=0)))


def leading_eigenvalue(M, tol=1e-12, max_iter=20000, n_restarts=8, seed=0):
    """Largest-modulus eigenvalue by power iteration with random restarts."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    n = M.shape[0]
    if n == 1:
        return complex(M[0, 0])
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_restarts):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v /= np.linalg.norm(v)
        lam = 0.0 + 0.0j
        for _ in range(max_iter):
            w = M @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                lam = 0.0 + 0.0j
                break
            w /= nw
            new = np.vdot(w, M @ w) / np.vdot(w, w)
            if abs(new - lam) < tol * max(abs(new), 1.0):
                lam = new
                break
            lam, v = new, w
        if best is None or abs(lam) > abs(best):
            best = complex(lam)
    # defective or closely tied dominant pairs stall power iteration; a
    # Schur-style QR pass on the small matrix settles those cases
    if n <= 64:
        ev = np.linalg.eigvals(M)
        lam_qr = complex(ev[np.argmax(np.abs(ev))])
        if abs(lam_qr) > abs(best) * (1.0 + 1e-10):
            best = lam_qr
    return best


def spectral_radius(M, **kw):
    return abs(leading_eigenvalue(M, **kw))


def char_poly_eigenvalues(M):
    """Roots of the characteristic polynomial via Faddeev-LeVerrier.

    Independent cross-check for small matrices (N <= 6 regime).
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    P = np.eye(n, dtype=complex)
    for i in range(1, n + 1):
        P = M @ P
        c = -np.trace(P) / i
        coeffs[i] = c
        P = P + c * np.eye(n)
    return np.roots(coeffs)


# -- spectral-radius bound --------------------------------------------------


def _log_power_norms(M, k):
    """ln ||M^m|| for m = 0..k in the induced l1 norm, with rescaling."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    logs = [0.0]
    P = np.eye(M.shape[0], dtype=complex)
    acc = 0.0
    for _ in range(k):
        P = M @ P
        nrm = induced_norm(P)
        if nrm == 0.0:
            logs.extend([-math.inf] * (k - len(logs) + 1))
            break
        acc += math.log(nrm)
        P /= nrm
        logs.append(acc)
    return np.array(logs[: k + 1])


def _log_binom(k, i):
    return math.lgamma(k + 1) - math.lgamma(i + 1) - math.lgamma(k - i + 1)


def binomial_constant(M, delta, k):
    """C = sum_{i=1..k} C(k,i) ||A^(k-i)|| delta^(i-1), in log arithmetic."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    logs = _log_power_norms(M, k)
    terms = []
    for i in range(1, k + 1):
        t = _log_binom(k, i) + logs[k - i]
        if i > 1:
            if delta == 0.0:
                continue
            t += (i - 1) * math.log(delta)
        terms.append(t)
    if not terms:
        return 0.0
    m = max(terms)
    return math.exp(m) * sum(math.exp(t - m) for t in terms)


def rsp_bound(constants):
    """The bound gamma^(1/k) (1 + C delta / gamma)^(1/k), log-stabilized."""
    g, d, C, k = (constants.gamma, constants.delta, constants.C, constants.k)
    lg = math.log(g)
    if d == 0.0 or C == 0.0:
        return math.exp(lg / k)
    x = math.log(C) + math.log(d) - lg
    if x > 30.0:
        ln1p = x + math.log1p(math.exp(-x))
    else:
        ln1p = math.log1p(math.exp(x))
    return math.exp((lg + ln1p) / k)


# -- tail constants ---------------------------------------------------------


def _split_norms(diff, N, rho_out):
    """(|P_<=N d|_rho, |P_>N d|_rho') for a difference map d."""
    low = diff.project_leq(N)
    high = diff - low
    f_low, _ = low.basis_expand()
    f_high, spill = high.basis_expand(rho=rho_out)
    return float(np.sum(np.abs(f_low[:N]))), float(np.sum(np.abs(f_high)) + spill)


def estimate_tail_constants(fhat, N, eps=0.01, cfg=None, k=80,
                            probes=None, matrix=None, base=None):
    """BoundConstants from finite-difference probes and the matrix A_N.

    The suprema in the defect bounds are replaced by maxima over the probe
    vectors (defaults e_(N+1) for the tail directions and e_2 for the slice),
    and the high-order parts are controlled through the (rho/rho')^(N+1)
    compactness factor evaluated at the larger radius rho'.
    """
    cfg = cfg or RenormConfig()
    if probes is None:
        probes = (N + 1, 2)
    tail_probe, slice_probe = probes[0], probes[1]
    if base is None:
        base = _base_image(fhat, cfg)
    rho, rho_out = cfg.rho_in, cfg.rho_out
    tail_factor = (rho / rho_out) ** (N + 1)
    pref_small = 1.0 / eps
    pref_big = eps / (1.0 - eps)

    def probe_norms(j):
        e = basis_map(j, fhat.rho)
        d_small = _renorm(fhat + eps * e, cfg) - base
        d_big = _renorm(fhat + e, cfg) - base
        return (_split_norms(d_small, N, rho_out),
                _split_norms(d_big, N, rho_out))

    (s_low, s_high), (b_low, b_high) = probe_norms(tail_probe)
    C1 = (pref_small * s_low + pref_big * b_low
          + tail_factor * (pref_small * s_high + pref_big * b_high))
    (s_low2, s_high2), (b_low2, b_high2) = probe_norms(slice_probe)
    C2 = tail_factor * (pref_small * s_high2 + pref_big * b_high2)

    delta = max(C1, C2)
    if matrix is None:
        matrix = build_matrix(fhat, N, eps, cfg, base=base)
    logs = _log_power_norms(matrix.entries, k)
    gamma = math.exp(logs[k])
    C = binomial_constant(matrix.entries, delta, k)
    return BoundConstants(gamma, delta, C, k, C1=C1, C2=C2,
                          tail_factor=tail_factor)


# -- experiments ------------------------------------------------------------


def leading_eigenvalue_trend(fhat, N_list, eps=0.01, cfg=None, matrix=None):
    """Leading eigenvalues of A_N for increasing N (columns shared)."""
    N_list = sorted(N_list)
    if matrix is None:
        matrix = build_matrix(fhat, N_list[-1], eps, cfg)
    return [leading_eigenvalue(matrix.submatrix(N).entries) for N in N_list]


def unstable_direction_probe(fhat, eps=0.01, cfg=None, v=None):
    """Growth factor of the multiplier component along a transverse probe.

    Perturbs along v with v'(0) != 0 (off the stable slice), renormalizes
    without the stable projection, and returns |delta c_1| / eps.
    """
    cfg = cfg or RenormConfig()
    if v is None:
        v = AnalyticMap([1.0], fhat.rho)
    if v.c(1) == 0:
        raise ValueError("probe lies on the stable slice: v'(0) = 0")
    scale = v.weighted_norm()

    def image(f):
        try:
            return renormalize_once(f, cfg).map_out
        except CylrenError:
            return renormalize_robust(f, cfg).map_out

    base = image(fhat)
    pert = image(fhat + (eps / scale) * v)
    return abs(pert.c(1) - base.c(1)) / (eps / scale) / scale
