"""Beltrami-equation solver for the crescent gluing coefficient.

The coefficient mu is sampled from the strip map on a polar grid, truncated
to the disk of radius R, and the equation g_zbar = mu g_z is solved by the
transform iteration
    h_{n+1} = T[nu (h_n + 1)],       nu = mu restricted to the grid disk,
followed by g(z) = P[nu (h* + 1)](z) + z and an affine normalization fixing
g(0) = 0 and g(1) = 1.
"""

from __future__ import annotations

import numpy as np

from cylren.errors import (
    DegenerateGluingError,
    InversionError,
    NonContractionError,
)
from cylren.polar_field import PolarField, default_radii
from cylren.transforms import (
    TransformEvaluator,
    TransformPlan,
    cauchy_transform,
    hilbert_transform,
)

K_CAP = 0.99
DEFAULT_P = 4.0


def hilbert_norm_bound(p):
    """The L_p operator-norm bound c_p = cot^2(pi/2p) of the transform."""
    return 1.0 / np.tan(np.pi / (2.0 * p)) ** 2


class BeltramiProblem:
    """A compactly supported Beltrami coefficient plus solver controls."""

    def __init__(self, mu, p=DEFAULT_P, solve_tol=1e-10, max_iter=400):
        if not p > 2:
            raise ValueError("integrability exponent p must exceed 2")
        self.mu = mu
        self.p = float(p)
        self.solve_tol = float(solve_tol)
        self.max_iter = int(max_iter)
        self.K = float(np.max(np.abs(mu.to_samples())))
        if self.K >= K_CAP:
            raise DegenerateGluingError(
                f"coefficient bound K = {self.K:.4f} >= {K_CAP}: "
                "the gluing is not uniformly quasiconformal on the grid"
            )
        # Hypothesis of the contraction estimate; the iteration usually
        # converges well beyond it, so it is reported rather than enforced.
        self.contraction_certified = self.K * hilbert_norm_bound(p) < 1.0


def build_mu(f, crescent, R, n_radii=256, n_modes=512, r_min_factor=1e-3,
             p=DEFAULT_P, solve_tol=1e-10, max_iter=400):
    """Sample the crescent gluing coefficient on a polar grid in D_R.

    The angular grid carries a half-cell offset keeping nodes off the
    weight jump at phi = 0; mu outside D_R is discarded (the solution error
    from the dropped tail is O(R^{-4/p})).
    """
    radii = default_radii(R, n_radii, r_min_factor)
    phi0 = np.pi / n_modes
    phis = phi0 + 2.0 * np.pi * np.arange(n_modes) / n_modes
    wrapped = np.where(phis > np.pi, phis - 2.0 * np.pi, phis)
    samples = crescent.beltrami_samples(radii, wrapped)
    mu = PolarField.from_samples(samples, radii, R, phi0=phi0)
    return BeltramiProblem(mu, p=p, solve_tol=solve_tol, max_iter=max_iter)


class BeltramiSolution:
    """Normalized quasiconformal map g with g(0) = 0, g(1) = 1."""

    def __init__(self, problem, h_star, history, converged):
        self.problem = problem
        self.h_star = h_star
        self.history = list(history)
        self.converged = bool(converged)
        mu = problem.mu
        dens = PolarField.from_samples(
            mu.to_samples() * (h_star.to_samples() + 1.0),
            mu.radii, mu.support_radius, phi0=mu.phi0,
        )
        self.density = dens
        self._cauchy = TransformEvaluator(cauchy_transform(dens), dens, "cauchy")
        self._hilbert = TransformEvaluator(hilbert_transform(dens), dens, "hilbert")
        self._g0 = self._cauchy.eval(0.0)
        self._scale = (1.0 + self._cauchy.eval(1.0)) - self._g0
        if abs(self._scale) < 1e-12:
            raise DegenerateGluingError("normalization points collapse: g(1) = g(0)")

    # -- evaluation ---------------------------------------------------------

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = (z + self._cauchy.eval(z) - self._g0) / self._scale
        return out if np.ndim(out) else complex(out)

    def deriv_z(self, z):
        """g_z from the Hilbert transform of the final density."""
        out = (1.0 + self._hilbert.eval(z)) / self._scale
        return out if np.ndim(out) else complex(out)

    def deriv_zbar(self, z):
        """g_zbar = nu (h* + 1), zero outside the coefficient support."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        dens = self.density.eval(z)
        dens = np.atleast_1d(np.asarray(dens))
        dens[np.abs(z) > self.problem.mu.support_radius] = 0.0
        out = dens / self._scale
        return out if z.size > 1 else complex(out[0])

    def eval_inverse(self, w, seed=None, tol=1e-10, max_iter=60):
        """Invert g by a quasiconformal Newton step g_z dz + g_zbar dzb = -err."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        z = np.array(w if seed is None else np.broadcast_to(seed, w.shape),
                     dtype=complex)
        for _ in range(max_iter):
            err = np.atleast_1d(self.eval(z)) - w
            if np.all(np.abs(err) < tol):
                return z if w.size > 1 else complex(z[0])
            gz = np.atleast_1d(self.deriv_z(z))
            gzb = np.atleast_1d(self.deriv_zbar(z))
            det = np.abs(gz) ** 2 - np.abs(gzb) ** 2
            if np.any(det <= 0):
                raise InversionError("inverse Newton hit a degenerate derivative")
            z -= (np.conj(gz) * err - gzb * np.conj(err)) / det
        raise InversionError("inverse Newton did not converge")

    # -- diagnostics --------------------------------------------------------

    def residual_report(self, n_probes=400, fd_step=None, rng_seed=0):
        """Statistics of |g_zbar - mu g_z| by centered finite differences.

        Probes are drawn in the interior annulus, three cells away from the
        origin row and the support circle.
        """
        mu = self.problem.mu
        radii = mu.radii
        rng = np.random.default_rng(rng_seed)
        r = np.exp(rng.uniform(np.log(radii[3]), np.log(radii[-4]), n_probes))
        phi = rng.uniform(-np.pi, np.pi, n_probes)
        z = r * np.exp(1j * phi)
        h = fd_step if fd_step is not None else np.maximum(1e-6, 1e-4 * r)
        gpx = self.eval(z + h)
        gmx = self.eval(z - h)
        gpy = self.eval(z + 1j * h)
        gmy = self.eval(z - 1j * h)
        gx = (gpx - gmx) / (2.0 * h)
        gy = (gpy - gmy) / (2.0 * h)
        g_z = 0.5 * (gx - 1j * gy)
        g_zbar = 0.5 * (gx + 1j * gy)
        mu_val = np.atleast_1d(mu.eval(z))
        res = np.abs(g_zbar - mu_val * g_z)
        return {
            "median": float(np.median(res)),
            "mean": float(np.mean(res)),
            "max": float(np.max(res)),
            "n_probes": int(n_probes),
        }

    def conformality_off_support(self, n_probes=100, rng_seed=1):
        """max |g_zbar| at probes outside the inflated support disk."""
        R = self.problem.mu.support_radius
        rng = np.random.default_rng(rng_seed)
        r = R * np.exp(rng.uniform(np.log(1.1), np.log(3.0), n_probes))
        z = r * np.exp(1j * rng.uniform(-np.pi, np.pi, n_probes))
        h = 1e-5 * r
        gx = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h)
        gy = (self.eval(z + 1j * h) - self.eval(z - 1j * h)) / (2.0 * h)
        return float(np.max(np.abs(0.5 * (gx + 1j * gy))))


def solve(problem):
    """Run the transform iteration to its fixed point and build the map."""
    mu = problem.mu
    nu_samples = mu.to_samples()
    plan = TransformPlan(mu.radii, mu.n_modes)
    h = mu.with_coeffs(np.zeros_like(mu.coeffs))
    history = []
    converged = False
    for _ in range(problem.max_iter):
        dens_samples = nu_samples * (h.to_samples() + 1.0)
        dens = PolarField.from_samples(dens_samples, mu.radii,
                                       mu.support_radius, phi0=mu.phi0)
        h_new = hilbert_transform(dens, plan)
        inc = (h_new - h).lp_norm(problem.p)
        history.append(inc)
        h = h_new
        if inc < problem.solve_tol:
            converged = True
            break
        if len(history) >= 4 and all(
            history[-i] > history[-i - 1] for i in (1, 2, 3)
        ):
            raise NonContractionError(
                "iteration increments grew three times in a row: "
                f"history tail {history[-4:]}"
            )
    return BeltramiSolution(problem, h, history, converged)
