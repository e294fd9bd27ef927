"""Cylinder renormalization: one step, fixed-point iteration, domain check.

One step: build the crescent of f, straighten its gluing with the Beltrami
solver, push a circle through the strip chart into the crescent, apply the
first-return map, pull both curves back through the straightened chart, and
read off Taylor coefficients by the Cauchy integral over the resulting
polygonal contour.  The output is conjugated so its critical point is 1,
making the step independent of the linear coordinate choices.
"""

from __future__ import annotations

import numpy as np

from cylren.analytic_map import AnalyticMap, SIEGEL_MULTIPLIER
from cylren.beltrami import build_mu, solve
from cylren.crescent import _weight_to_angle, build_crescent
from cylren.errors import ContourError, CrescentError, CylrenError
from cylren.polar_field import mode_numbers  # noqa: F401  (re-export habit)

# Conjugation scales tried when a map's own crescent is not quasiconformal.
# The first entry is the identity; a few scales that work for maps far from
# the fixed point (the quadratic end of the iteration) come next, and the
# rest sweep rings of the scale plane.  Candidates are screened cheaply, so
# the list can afford to be generous.
_FALLBACK_SCALES = [1.0] + [
    m * np.exp(1j * np.deg2rad(d))
    for m, d in ((0.25, 50.0), (0.25, 60.0), (0.3, 60.0), (0.35, 60.0),
                 (0.9, 20.0), (0.7, 20.0), (1.2, 20.0))
] + [
    m * np.exp(1j * np.pi * k / 8.0)
    for m in (0.9, 0.7, 1.2, 0.62, 0.412, 0.25, 0.35, 0.5)
    for k in range(16)
]


class RenormConfig:
    """Knobs for one renormalization step."""

    def __init__(self, contour_radius=0.11, n_contour=1024, out_degree=17,
                 rho_in=2.266, rho_out=3.0, slope=1.1,
                 solver_R=10.0, n_radii=256, n_modes=512, r_min_factor=1e-3,
                 p=4.0, solve_tol=1e-10, solver_max_iter=400,
                 max_return=10, c0_tol=1e-2):
        if not rho_in < rho_out:
            raise ValueError("rho_in must be smaller than rho_out")
        self.contour_radius = float(contour_radius)
        self.n_contour = int(n_contour)
        self.out_degree = int(out_degree)
        self.rho_in = float(rho_in)
        self.rho_out = float(rho_out)
        self.slope = float(slope)
        self.solver_R = float(solver_R)
        self.n_radii = int(n_radii)
        self.n_modes = int(n_modes)
        self.r_min_factor = float(r_min_factor)
        self.p = float(p)
        self.solve_tol = float(solve_tol)
        self.solver_max_iter = int(solver_max_iter)
        self.max_return = int(max_return)
        self.c0_tol = float(c0_tol)

    def to_dict(self):
        return dict(self.__dict__)


class RenormResult:
    """Output map plus the diagnostics of the run."""

    def __init__(self, map_out, diagnostics, crescent=None, solution=None):
        self.map_out = map_out
        self.diagnostics = diagnostics
        self.crescent = crescent
        self.solution = solution


def conjugate_map(f, s):
    """Linear conjugation z -> f(s z)/s; fixes 0 and keeps the multiplier."""
    ks = np.arange(1, f.degree + 1)
    return AnalyticMap(f.coeffs * np.asarray(s) ** (ks - 1), f.rho)


def critical_point(f):
    """Smallest-modulus critical point (root of f')."""
    dcoef = f.derivative_coeffs()
    roots = np.roots(dcoef[::-1])
    if roots.size == 0:
        raise CylrenError("map has no critical point")
    return complex(roots[np.argmin(np.abs(roots))])


def critically_normalize(f):
    """Conjugate so the smallest critical point moves to 1."""
    return conjugate_map(f, critical_point(f))


def _winding_number(path, z0=0.0):
    rel = np.asarray(path) - z0
    return int(round(np.sum(np.angle(rel[np.r_[1:rel.size, 0]] / rel))
                     / (2.0 * np.pi)))


def _cauchy_coefficients(x, y, n_coeffs):
    """c_m = (1/2pi i) sum_j y_j x_j^-(m+1) (x_{j+1}-x_{j-1})/2, m = 0..n-1."""
    dx = (np.roll(x, -1) - np.roll(x, 1)) / 2.0
    lx = np.log(x)
    ms = np.arange(n_coeffs)
    powers = np.exp(-np.outer(ms + 1.0, lx))
    return powers @ (y * dx) / (2j * np.pi)


def build_pipeline(f, cfg):
    """Crescent plus straightening map for f, shared by the operations."""
    crescent = build_crescent(f, tangent_slope=cfg.slope)
    problem = build_mu(f, crescent, cfg.solver_R, n_radii=cfg.n_radii,
                       n_modes=cfg.n_modes, r_min_factor=cfg.r_min_factor,
                       p=cfg.p, solve_tol=cfg.solve_tol,
                       max_iter=cfg.solver_max_iter)
    solution = solve(problem)
    return crescent, solution


def _contour_angles(n):
    """Equispaced angles in (-pi, pi] avoiding the weight jump at 0."""
    return -np.pi + (np.arange(n) + 0.5) * 2.0 * np.pi / n


def _model_points(r, phi):
    return r * np.exp(1j * phi)


def _pull_back(crescent, pts):
    """Model-plane coordinates of crescent points (via the strip chart)."""
    xi, r, u, inside = crescent.locate(pts)
    if not np.all(inside):
        missing = int(np.size(inside) - np.count_nonzero(inside))
        raise ContourError(f"{missing} return points left the crescent chart")
    return r * np.exp(1j * _weight_to_angle(np.clip(u, 1e-15, 1.0)))


def renormalize_once(f, cfg=None, pipeline=None, self_distance=False):
    """One application of the cylinder renormalization operator."""
    cfg = cfg or RenormConfig()
    crescent, solution = pipeline or build_pipeline(f, cfg)
    phis = _contour_angles(cfg.n_contour)
    z_in = _model_points(cfg.contour_radius, phis)
    xi = crescent.strip_map(np.full(cfg.n_contour, cfg.contour_radius), phis)
    gamma = crescent.tau(xi)
    returned, counts, orbit_max = crescent.return_map_many(
        gamma, max_steps=cfg.max_return
    )
    z_out = _pull_back(crescent, returned)
    x = np.atleast_1d(solution.eval(z_in))
    y = np.atleast_1d(solution.eval(z_out))
    if _winding_number(x) != 1:
        raise ContourError("straightened contour does not wind once around 0")
    coeffs = _cauchy_coefficients(x, y, cfg.out_degree + 1)
    scale = max(abs(coeffs[1]), 1e-300)
    if abs(coeffs[0]) > cfg.c0_tol * scale:
        raise ContourError(
            f"constant Cauchy coefficient too large: |c_0| = {abs(coeffs[0]):.3g}"
        )
    raw = AnalyticMap(coeffs[1:], cfg.rho_in)
    z_c = critical_point(raw)
    out = conjugate_map(raw, z_c)
    diagnostics = {
        "return_counts": np.unique(counts).tolist(),
        "orbit_max": float(orbit_max.max()),
        "c0_abs": float(abs(coeffs[0])),
        "critical_scale": [z_c.real, z_c.imag],
        "solver_iterations": len(solution.history),
        "solver_K": solution.problem.K,
        "contour_radius": cfg.contour_radius,
    }
    if self_distance:
        diagnostics["self_distance"] = (out - f).weighted_norm()
    return RenormResult(out, diagnostics, crescent=crescent, solution=solution)


def feasible_representative(f, cfg=None):
    """A linear conjugate of f whose crescent gluing is quasiconformal.

    Cylinder renormalization is invariant under linear conjugation, so any
    representative may be renormalized in place of f; the output is pinned
    down again by the critical normalization.  Returns (map, scale).
    """
    cfg = cfg or RenormConfig()
    for g, s in iter_representatives(f, cfg):
        return g, s
    raise CrescentError("no linear conjugate admits the crescent")


def iter_representatives(f, cfg):
    """Yield conjugates of f passing the cheap crescent/return checks.

    The Beltrami solve is deliberately excluded: candidates are screened by
    crescent construction, the gluing bound K, and the contour's return
    orbits, which catch most degenerate scales at a fraction of the cost.
    """
    for s in _FALLBACK_SCALES:
        try:
            g = conjugate_map(f, s) if s != 1.0 else f
            crescent = build_crescent(g, tangent_slope=cfg.slope)
            # coarse dilatation pre-screen before the full-resolution datum
            mu_coarse = crescent.beltrami_samples(
                np.geomspace(1e-3, 1e3, 120),
                2.0 * np.pi * np.arange(48) / 48.0)
            if np.nanmax(np.abs(mu_coarse)) >= 0.99:
                continue
            build_mu(g, crescent, cfg.solver_R, n_radii=cfg.n_radii,
                     n_modes=cfg.n_modes, r_min_factor=cfg.r_min_factor,
                     p=cfg.p, solve_tol=cfg.solve_tol,
                     max_iter=cfg.solver_max_iter)
            phis = _contour_angles(cfg.n_contour)
            xi = crescent.strip_map(
                np.full(cfg.n_contour, cfg.contour_radius), phis)
            returned, counts, _ = crescent.return_map_many(
                crescent.tau(xi), max_steps=cfg.max_return)
            if not set(np.unique(counts)) <= {2, 3}:
                # later returns mean orbits stepped over the crescent: the
                # arc does not cut the dynamics with golden combinatorics
                raise CrescentError(
                    f"return counts {sorted(set(counts.tolist()))} != {{2, 3}}"
                )
            _pull_back(crescent, returned)
        except CylrenError:
            continue
        yield g, s


def renormalize_robust(f, cfg=None):
    """Renormalize f, falling back across conjugate representatives.

    The output is independent of the representative thanks to the critical
    normalization, so any scale whose full step succeeds is acceptable.
    """
    cfg = cfg or RenormConfig()
    last = None
    for g, s in iter_representatives(f, cfg):
        try:
            res = renormalize_once(g, cfg)
        except CylrenError as exc:
            last = exc
            continue
        res.diagnostics["representative_scale"] = [
            float(np.real(s)), float(np.imag(s))
        ]
        return res
    raise CrescentError(f"no linear conjugate renormalizes cleanly: {last}")


def project_stable(f):
    """Affine projection onto the slice with multiplier e^{2 pi i theta}."""
    return f.project_stable()


def iterate_fixed_point(f0, k, cfg=None, use_representative=True):
    """k steps of f -> P_s(R_cyl f); returns the list of RenormResult.

    When a step's crescent is not quasiconformal and `use_representative`
    is set, the step is run on a conjugate representative (the output is
    unchanged thanks to the critical normalization).
    """
    cfg = cfg or RenormConfig()
    f = f0
    results = []
    norms = []
    grow = 0
    for _ in range(int(k)):
        if use_representative:
            res = renormalize_robust(f, cfg)
        else:
            res = renormalize_once(f, cfg)
        new = project_stable(res.map_out)
        step = (new - f).weighted_norm()
        if norms and step > norms[-1]:
            grow += 1
            if grow >= 3:
                raise CylrenError(
                    f"step norms grew three times in a row: {norms + [step]}"
                )
        else:
            grow = 0
        norms.append(step)
        res.diagnostics["step_norm"] = step
        res.map_out = new
        results.append(res)
        f = new
    return results


def check_domain(f, cfg=None, loop_radius=0.135, n_samples=1000,
                 siegel_radius=0.045):
    """Domain experiment: loop image size and return-orbit containment.

    Checks that the straightened image of a loop in the crescent encircles
    the disk of radius rho_out (after rescaling by the critical point), and
    that return orbits started on the Siegel-scale circle stay inside the
    disk of radius rho_in, with side return counts 2 and 3.
    """
    cfg = cfg or RenormConfig()
    crescent, solution = build_pipeline(f, cfg)
    phis = _contour_angles(n_samples)

    xi = crescent.strip_map(np.full(n_samples, loop_radius), phis)
    loop = np.atleast_1d(solution.eval(
        _model_points(loop_radius, phis)))
    res = renormalize_once(f, cfg, pipeline=(crescent, solution))
    z_c = complex(*res.diagnostics["critical_scale"])
    scaled = loop / z_c
    encircles = (_winding_number(scaled) == 1
                 and float(np.min(np.abs(scaled))) >= cfg.rho_out)

    xi_s = crescent.strip_map(np.full(n_samples, siegel_radius), phis)
    ring = crescent.tau(xi_s)
    _, counts, orbit_max = crescent.return_map_many(ring,
                                                    max_steps=cfg.max_return)
    contained = bool(np.max(orbit_max) < cfg.rho_in)
    side = np.where(phis <= 0.0, "L", "R")
    side_counts = {
        "L": sorted(set(counts[side == "L"].tolist())),
        "R": sorted(set(counts[side == "R"].tolist())),
    }
    return {
        "encircles_out_disk": bool(encircles),
        "loop_min_modulus": float(np.min(np.abs(scaled))),
        "containment_in_disk": contained,
        "max_modulus": float(np.max(orbit_max)),
        "iterate_counts": side_counts,
        "critical_scale": res.diagnostics["critical_scale"],
    }
