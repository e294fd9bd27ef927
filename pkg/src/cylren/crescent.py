"""Fundamental crescent for period 1: boundary, strip coordinate, gluing map.

The crescent is bounded by a two-parabola arc from 0 to the repelling fixed
point a (radially parametrized) and its f-preimage.  The coordinate
    tau(xi) = a / (1 - exp(i alpha xi + beta))
maps a vertical strip onto the crescent; the strip map interpolates between
the two boundary curves with an angular weight, and its non-conformality is
the Beltrami datum handed to the solver.
"""

from __future__ import annotations

import numpy as np

from cylren.errors import CrescentError, DegenerateGluingError, InversionError

ENDPOINT_EXCLUSION = 1e-6
DEFAULT_TANGENT_SLOPE = 1.1


def _heaviside_weight(phi):
    """u(phi) = eta(-phi) + phi/(2 pi) on (-pi, pi], with eta(0) = 1."""
    phi = np.asarray(phi, dtype=float)
    return phi / (2.0 * np.pi) + (phi <= 0.0)


def _weight_to_angle(u):
    """Inverse of the angular weight, mapping (0, 1] back to (-pi, pi]."""
    u = np.asarray(u, dtype=float)
    return np.where(u <= 0.5, 2.0 * np.pi * u, 2.0 * np.pi * (u - 1.0))


def _blend(u, gamma):
    """Cubic Hermite H(u) with H(0) = 0, H(1) = 1, H'(0) H'(1) = 1.

    The endpoint derivatives are sqrt(gamma) and 1/sqrt(gamma), so the
    chart's angular derivative jumps by exactly the gluing factor across
    the cut, where the dynamics identifies the two edges.
    """
    s = np.sqrt(gamma)
    return s * u * (1.0 - u) ** 2 + u**2 * (3.0 - 2.0 * u) + u**2 * (u - 1.0) / s


def _blend_du(u, gamma):
    s = np.sqrt(gamma)
    return (
        s * (1.0 - u) * (1.0 - 3.0 * u)
        + 6.0 * u * (1.0 - u)
        + u * (3.0 * u - 2.0) / s
    )


def _blend_dgamma(u, gamma):
    s = np.sqrt(gamma)
    return u * (1.0 - u) ** 2 / (2.0 * s) + u**2 * (1.0 - u) / (2.0 * gamma * s)


class FundamentalCrescent:
    """Geometry of the period-1 crescent of a Siegel map.

    Build with :func:`build_crescent`; instances are immutable in use.
    """

    def __init__(self, f, tangent_slope, table_size=6000, validate=True):
        self.f = f
        self.slope = float(tangent_slope)
        self.a = f.find_repelling_fixed_point()
        orbit = f.iterate(4, 1.0, escape_radius=None)
        self.f3 = orbit[2]
        self.f4 = orbit[3]
        self._solve_parabolas()
        self._solve_strip_constants()
        self._build_tables(table_size)
        if validate:
            self.validate_simple_arc()

    # -- boundary curve ----------------------------------------------------

    def _solve_parabolas(self):
        f4, a = self.f4, self.a
        self.total_length = abs(a - f4) + abs(f4)
        s = abs(f4) / self.total_length
        self.r_switch = (s / (1.0 - s)) ** 2
        x4 = f4.real
        if abs(x4) < 1e-12:
            raise CrescentError("anchor f^4(1) lies on the imaginary axis")
        # first parabola x + i(Ax^2 + Bx) through 0 and f^4(1), slope fixed
        self.pA = (self.slope * x4 - f4.imag) / x4**2
        self.pB = self.slope - 2.0 * self.pA * x4
        # second parabola (Cy^2 + Dy + E) + iy through f^4(1) and a
        y4, ya = f4.imag, a.imag
        if abs(y4 - ya) < 1e-12:
            raise CrescentError("degenerate second parabola: equal imaginary parts")
        m = np.array(
            [[y4**2, y4, 1.0], [ya**2, ya, 1.0], [2.0 * y4, 1.0, 0.0]]
        )
        rhs = np.array([f4.real, a.real, 1.0 / self.slope])
        self.pC, self.pD, self.pE = np.linalg.solve(m, rhs)

    def arc_position(self, r):
        """Arc-length-like parameter T(r), increasing from 0 to total_length."""
        sq = np.sqrt(r)
        return self.total_length * sq / (sq + 1.0)

    def arc_position_deriv(self, r):
        sq = np.sqrt(r)
        return self.total_length / (2.0 * sq * (sq + 1.0) ** 2)

    def boundary_point(self, r):
        """The radially parametrized boundary arc from 0 (r=0) to a (r=inf)."""
        r = np.asarray(r, dtype=float)
        t = self.arc_position(r)
        f4 = self.f4
        xdir = f4.real / abs(f4)
        x = xdir * t
        first = x + 1j * (self.pA * x**2 + self.pB * x)
        d = abs(self.a - f4)
        y = f4.imag * (self.total_length - t) / d + self.a.imag * (t - abs(f4)) / d
        second = (self.pC * y**2 + self.pD * y + self.pE) + 1j * y
        out = np.where(r <= self.r_switch, first, second)
        return out if out.ndim else complex(out)

    def boundary_deriv(self, r):
        r = np.asarray(r, dtype=float)
        t = self.arc_position(r)
        dt = self.arc_position_deriv(r)
        f4 = self.f4
        xdir = f4.real / abs(f4)
        x = xdir * t
        dfirst = xdir * dt * (1.0 + 1j * (2.0 * self.pA * x + self.pB))
        d = abs(self.a - f4)
        y = f4.imag * (self.total_length - t) / d + self.a.imag * (t - abs(f4)) / d
        dy = dt * (self.a.imag - f4.imag) / d
        dsecond = dy * ((2.0 * self.pC * y + self.pD) + 1j)
        out = np.where(r <= self.r_switch, dfirst, dsecond)
        return out if out.ndim else complex(out)

    # -- strip coordinate --------------------------------------------------

    def _solve_strip_constants(self):
        """Fix beta, alpha and the log branch of the f^4(1) anchor.

        beta makes tau^-1(f^3(1)) = 0 and alpha makes |tau^-1(f^4(1))| = 1.
        The branch of log(1 - a/f^4(1)) is the one for which the induced
        strip translation tau^-1(f^4(1)) points to the right (the dynamics
        advances by roughly one unit across the strip) and the deck spacing
        2 pi / alpha exceeds the strip width; otherwise the crescent cannot
        be uniformized by this chart.
        """
        a = self.a
        self.beta = np.log(1.0 - a / self.f3)
        w4_main = np.log(1.0 - a / self.f4)
        best = None
        for m in range(-3, 4):
            w4 = w4_main + 2j * np.pi * m
            alpha = abs(w4 - self.beta)
            if not 0 < alpha < 2.0 * np.pi:
                continue
            xi4 = (w4 - self.beta) / (1j * alpha)
            if xi4.real <= abs(xi4.imag):
                continue
            if best is None or xi4.real > best[2].real:
                best = (w4, alpha, xi4)
        if best is None:
            raise CrescentError(
                "no log branch gives a rightward strip translation; "
                "the crescent anchors are unsuitable for this map"
            )
        self.w4_log, self.alpha, self.strip_translation = best
        self.deck_shift = 2.0 * np.pi / self.alpha  # real spacing of log branches

    def tau(self, xi):
        """Strip -> crescent coordinate."""
        xi = np.asarray(xi, dtype=complex)
        out = self.a / (1.0 - np.exp(1j * self.alpha * xi + self.beta))
        return out if out.ndim else complex(out)

    def tau_inverse(self, z, branch=0):
        """Crescent -> strip; branches differ by real shifts 2 pi / alpha."""
        z = np.asarray(z, dtype=complex)
        w = np.log(1.0 - self.a / z) + 2j * np.pi * branch
        out = (w - self.beta) / (1j * self.alpha)
        return out if out.ndim else complex(out)

    def tau_inverse_deriv(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.a / (1j * self.alpha * z * (z - self.a))
        return out if out.ndim else complex(out)

    def tau_inverse_near(self, z, xi_ref):
        """The tau-inverse branch closest to a reference strip point."""
        base = self.tau_inverse(z)
        m = np.round(np.real(np.asarray(xi_ref) - base) / self.deck_shift)
        out = base + m * self.deck_shift
        return out if np.ndim(out) else complex(out)

    # -- preimage curve and strip boundary tables --------------------------

    def _build_tables(self, n, r_lo=1e-14, r_hi=1e14):
        self.r_table = np.geomspace(r_lo, r_hi, n)
        lam = self.boundary_point(self.r_table)
        self.lam_table = lam
        self.B_log = self._unwrapped_log(lam, target=self.w4_log)
        # preimage boundary: anchored at f^3(1) where lambda = f^4(1), then
        # tracked by continuity of the strip coordinate.  Near the critical
        # value the boundary hops between analytic branches of f^-1, so all
        # roots of f(w) = lambda(r) are examined at every radius.
        w = np.empty(n, dtype=complex)
        xi = np.empty(n, dtype=complex)
        mid = int(np.clip(np.searchsorted(self.r_table, self.r_switch), 1, n - 2))
        w[mid] = self._newton_inverse(lam[mid], self.f3)
        xi[mid] = self.tau_inverse_near(w[mid], 0.0)
        for order in (range(mid + 1, n), range(mid - 1, -1, -1)):
            prev_w, prev_xi = w[mid], xi[mid]
            for i in order:
                prev_w, prev_xi = self._track_preimage(lam[i], prev_w, prev_xi)
                w[i], xi[i] = prev_w, prev_xi
        self.finv_table = w
        if abs(w[mid] - self.f3) > 1e-2 * max(abs(self.f3), 1.0):
            raise CrescentError(
                "preimage branch misses f^3(1): continuation left the crescent"
            )
        self.A_log = 1j * self.alpha * xi + self.beta

    def _unwrapped_log(self, pts, target):
        """log(1 - a/z) along a curve, continuous, matching `target` near r~."""
        w = np.log(1.0 - self.a / pts)
        w = w.real + 1j * np.unwrap(w.imag)
        i0 = int(np.searchsorted(self.r_table, self.r_switch))
        i0 = min(max(i0, 0), pts.size - 1)
        k = np.round((target.imag - w[i0].imag) / (2.0 * np.pi))
        return w + 2j * np.pi * k

    def _track_preimage(self, target, prev_w, prev_xi):
        """Preimage of the arc point nearest the previous one in the strip."""
        poly = np.concatenate([self.f.coeffs[::-1], [-target]])
        roots = np.roots(poly)
        good = np.abs(roots) > 1e-12
        roots = roots[good] if good.any() else roots
        cand = self.tau_inverse_near(roots, prev_xi)
        j = int(np.argmin(np.abs(cand - prev_xi)))
        return complex(roots[j]), complex(cand[j])

    def _newton_inverse(self, target, seed, tol=1e-13, max_iter=60):
        z = complex(seed)
        scale = max(abs(target), 1.0)
        for _ in range(max_iter):
            fz = self.f.eval(z)
            dfz = self.f.deriv(z)
            if abs(dfz) < 1e-15:
                raise InversionError("f' vanished during boundary preimage Newton")
            step = (fz - target) / dfz
            z -= step
            if abs(step) < tol * scale:
                return z
        raise InversionError("boundary preimage Newton did not converge")

    def finv_boundary(self, r):
        """f-preimage of the boundary arc at arbitrary radial parameters."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        target = self.boundary_point(r)
        seeds = self._interp_table(self.finv_table, r)
        out = self._vector_newton(target, seeds)
        return out if r.size > 1 else complex(out[0])

    def _vector_newton(self, targets, seeds, tol=1e-13, max_iter=60):
        z = np.array(seeds, dtype=complex)
        scale = np.maximum(np.abs(targets), 1.0)
        active = np.ones(z.shape, dtype=bool)
        for _ in range(max_iter):
            with np.errstate(over="ignore", invalid="ignore"):
                fz = self.f.eval(z[active])
                dfz = self.f.deriv(z[active])
                step = (fz - targets[active]) / dfz
            bad = ~np.isfinite(step)
            step = np.where(bad, 0.0, step)
            z[active] -= step
            done = (np.abs(step) < tol * scale[active]) | bad
            idx = np.flatnonzero(active)
            z[idx[bad]] = np.nan  # divergent points are reported, not fatal
            active[idx[done]] = False
            if not active.any():
                return z
        raise InversionError("vectorized boundary preimage Newton stalled")

    def _interp_table(self, table, r):
        lr = np.log(np.clip(r, self.r_table[0], self.r_table[-1]))
        ltab = np.log(self.r_table)
        re = np.interp(lr, ltab, table.real)
        im = np.interp(lr, ltab, table.imag)
        return re + 1j * im

    def strip_curves(self, r):
        """Strip boundary values (A, B) = tau^-1 of (preimage arc, arc) at r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        lam = self.boundary_point(r)
        finv = self.finv_boundary(r)
        finv = np.atleast_1d(np.asarray(finv))
        B = self._branch_matched_log(lam, self.B_log, r)
        A = self._branch_matched_log(finv, self.A_log, r)
        return (
            (A - self.beta) / (1j * self.alpha),
            (B - self.beta) / (1j * self.alpha),
        )

    def _branch_matched_log(self, pts, log_table, r):
        w = np.log(1.0 - self.a / pts)
        ref = self._interp_table(log_table, r)
        k = np.round((ref.imag - w.imag) / (2.0 * np.pi))
        return w + 2j * np.pi * k

    def strip_curve_derivs(self, r):
        """d/dr of the strip boundary curves (exact chain rule)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        lam = self.boundary_point(r)
        dlam = self.boundary_deriv(r)
        finv = np.atleast_1d(np.asarray(self.finv_boundary(r)))
        dB = self.tau_inverse_deriv(lam) * dlam
        dA = self.tau_inverse_deriv(finv) * dlam / self.f.deriv(finv)
        return dA, dB

    # -- strip (gluing) map -------------------------------------------------

    def gluing_factor(self, r):
        """Derivative gamma(r) of the edge gluing f in the strip chart.

        gamma = f'(w) w (w - a) / (lambda (lambda - a)) with w the preimage
        arc point and lambda = f(w) the arc point.  Also returns d gamma/dr.
        The chart blend matches its angular derivatives across the cut by a
        factor gamma, which makes the quotient dilatation continuous there.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        lam = self.boundary_point(r)
        dlam = self.boundary_deriv(r)
        w = np.atleast_1d(np.asarray(self.finv_boundary(r)))
        a = self.a
        fp = self.f.deriv(w)
        nw = w * (w - a)
        nl = lam * (lam - a)
        gamma = fp * nw / nl
        dw = dlam / fp
        dgamma = (
            (self.f.deriv2(w) * nw + fp * (2.0 * w - a)) * dw / nl
            - fp * nw * (2.0 * lam - a) * dlam / nl**2
        )
        return gamma, dgamma

    def strip_map(self, r, phi):
        """g_1(r, phi): Hermite blend of the strip curves, C^1 at the cut."""
        u = _heaviside_weight(phi)
        r = np.atleast_1d(r)
        A, B = self.strip_curves(r)
        gamma, _ = self.gluing_factor(r)
        out = np.ravel(B + (A - B) * _blend(u, gamma))
        if np.ndim(phi) == 0 and out.size == 1:
            return complex(out[0])
        return out

    def strip_map_inverse(self, xi, max_iter=40, tol=1e-12):
        """Invert g_1 by a planar Newton iteration in (log r, weight).

        Returns (z, ok): the punctured-plane points r e^{i phi(u)} and a
        success mask (convergence with weight inside (0, 1]).
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        r, u = self._inverse_seed(xi)
        lr = np.log(r)
        for _ in range(max_iter):
            r = np.exp(lr)
            A, B = self.strip_curves(r)
            dA, dB = self.strip_curve_derivs(r)
            gamma, dgamma = self.gluing_factor(r)
            H = _blend(u, gamma)
            val = B + (A - B) * H - xi
            d_lr = r * (
                dB + (dA - dB) * H + (A - B) * _blend_dgamma(u, gamma) * dgamma
            )
            d_u = (A - B) * _blend_du(u, gamma)
            det = d_lr.real * d_u.imag - d_lr.imag * d_u.real
            det = np.where(np.abs(det) < 1e-300, np.nan, det)
            dlr = (val.real * d_u.imag - val.imag * d_u.real) / det
            du = (d_lr.real * val.imag - d_lr.imag * val.real) / det
            step = np.hypot(dlr, du)
            step = np.where(np.isfinite(step), step, 0.0)
            cap = np.minimum(1.0, 0.5 / np.maximum(step, 1e-300))
            with np.errstate(invalid="ignore"):
                lr -= np.where(np.isfinite(dlr), dlr, 0.0) * cap
                u -= np.where(np.isfinite(du), du, 0.0) * cap
            lr = np.clip(lr, np.log(self.r_table[0]), np.log(self.r_table[-1]))
            u = np.clip(u, -1.0, 2.0)
            if np.all(step < tol):
                break
        r = np.exp(lr)
        A, B = self.strip_curves(r)
        gamma, _ = self.gluing_factor(r)
        resid = np.abs(B + (A - B) * _blend(u, gamma) - xi)
        ok = (resid < 1e-8) & (u > 0.0) & (u <= 1.0 + 1e-12) & np.isfinite(u)
        u_cl = np.clip(u, 1e-15, 1.0)
        z = r * np.exp(1j * _weight_to_angle(u_cl))
        return (z, ok) if xi.size > 1 else (complex(z[0]), bool(ok[0]))

    def _inverse_seed(self, xi):
        step = max(self.r_table.size // 600, 1)
        rs = self.r_table[::step]
        A, B = self.strip_curves(rs)
        us = np.linspace(0.05, 1.0, 13)
        gamma, _ = self.gluing_factor(rs)
        grid = B[None, :] + (A - B)[None, :] * _blend(
            us[:, None], gamma[None, :]
        )
        flat = grid.ravel()
        idx = np.argmin(
            np.abs(xi[:, None] - flat[None, :]), axis=1
        )
        ui, ri = np.unravel_index(idx, grid.shape)
        return rs[ri].astype(float), us[ui].astype(float)

    # -- membership and return map -----------------------------------------

    def _clip_range(self):
        lam = self.lam_table
        near0 = np.abs(lam) > ENDPOINT_EXCLUSION
        neara = np.abs(lam - self.a) > ENDPOINT_EXCLUSION
        good = np.flatnonzero(near0 & neara)
        if good.size < 10:
            raise CrescentError("boundary arc collapsed onto its endpoints")
        return self.r_table[good[0]], self.r_table[good[-1]]

    def _deck_candidates(self, xi):
        """Likely tau-inverse deck shifts putting xi between the strip curves."""
        im_b = -(self.B_log.real - self.beta.real) / self.alpha
        re_b = (self.B_log.imag - self.beta.imag) / self.alpha
        ref = np.interp(np.clip(xi.imag, im_b[0], im_b[-1]), im_b, re_b)
        m0 = np.round((ref - xi.real) / self.deck_shift)
        return m0

    def locate(self, z):
        """Strip coordinates of points of the crescent.

        Returns (xi, r, u, inside): the deck-shifted strip value, radial
        parameter, angular weight and a membership mask.  Points outside the
        crescent get the coordinates of the nearest failed Newton attempt.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        xi0 = self.tau_inverse(z)
        m0 = self._deck_candidates(xi0)
        xi = np.array(xi0 + m0 * self.deck_shift)
        r = np.full(z.size, np.nan)
        u = np.full(z.size, np.nan)
        inside = np.zeros(z.size, dtype=bool)
        for dm in (0.0, -1.0, 1.0):
            todo = ~inside
            if not todo.any():
                break
            cand = xi0[todo] + (m0[todo] + dm) * self.deck_shift
            w, ok = self.strip_map_inverse(cand)
            w = np.atleast_1d(np.asarray(w))
            ok = np.atleast_1d(ok)
            idx = np.flatnonzero(todo)
            hit = idx[ok]
            xi[hit] = cand[ok]
            r[hit] = np.abs(w[ok])
            u[hit] = _heaviside_weight(np.angle(w[ok]))
            inside[hit] = True
        if z.size > 1:
            return xi, r, u, inside
        return complex(xi[0]), float(r[0]), float(u[0]), bool(inside[0])

    def contains(self, z):
        """Membership test via invertibility of the strip map."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        inside = self.locate(z)[-1]
        return inside if z.size > 1 else bool(inside)

    def return_map(self, z, max_steps=10, escape_radius=None, expected=None):
        """First return of the crescent under f; returns (value, steps).

        With `expected` set to a step count, a mismatch raises CrescentError.
        """
        w = complex(z)
        if not self.contains(w):
            raise CrescentError("return_map requires a point of the crescent")
        for i in range(1, max_steps + 1):
            w = self.f.eval(w)
            if escape_radius is not None and abs(w) > escape_radius:
                raise CrescentError(f"orbit escaped at step {i}: |z|={abs(w):.4g}")
            if self.contains(w):
                if expected is not None and i != expected:
                    raise CrescentError(
                        f"return after {i} iterates, expected {expected}"
                    )
                return w, i
        raise CrescentError(f"no return within {max_steps} iterates")

    def return_map_many(self, z, max_steps=10):
        """Vectorized first return; returns (values, step counts, orbit max)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = z.copy()
        counts = np.zeros(z.size, dtype=int)
        active = np.ones(z.size, dtype=bool)
        orbit_max = np.abs(z)
        for i in range(1, max_steps + 1):
            w[active] = self.f.eval(w[active])
            orbit_max[active] = np.maximum(orbit_max[active], np.abs(w[active]))
            back = np.zeros_like(active)
            back[active] = self.contains(w[active])
            counts[back & active] = i
            active &= ~back
            if not active.any():
                break
        if active.any():
            raise CrescentError(
                f"{int(active.sum())} orbits failed to return within {max_steps}"
            )
        return w, counts, orbit_max

    # -- Beltrami datum -----------------------------------------------------

    def beltrami_samples(self, radii, phis):
        """mu on the polar grid, from the exact partials of the strip map."""
        radii = np.asarray(radii, dtype=float)
        phis = np.asarray(phis, dtype=float)
        A, B = self.strip_curves(radii)
        dA, dB = self.strip_curve_derivs(radii)
        gamma, dgamma = self.gluing_factor(radii)
        u = _heaviside_weight(phis)[None, :]
        g = gamma[:, None]
        H = _blend(u, g)
        r_dr = radii[:, None] * (
            dB[:, None]
            + (dA - dB)[:, None] * H
            + (A - B)[:, None] * _blend_dgamma(u, g) * dgamma[:, None]
        )
        i_dphi = 1j * (A - B)[:, None] * _blend_du(u, g) / (2.0 * np.pi)
        num = r_dr + i_dphi
        den = r_dr - i_dphi
        scale = np.maximum(np.abs(num) + np.abs(den), 1e-300)
        if np.any(np.abs(den) < 1e-12 * scale):
            raise DegenerateGluingError("strip map partials cancel at a grid node")
        mu = np.exp(2j * phis)[None, :] * num / den
        if not np.all(np.isfinite(mu)):
            raise DegenerateGluingError(
                "strip map partials overflow: the chart degenerates on the grid"
            )
        return mu

    # -- validation and output ----------------------------------------------

    def validate_simple_arc(self, n=2048):
        """Check that the arc and its preimage only meet near the endpoints."""
        lo, hi = self._clip_range()
        rs = np.geomspace(lo, hi, n)
        p = self.boundary_point(rs)
        q = self._interp_table(self.finv_table, rs)
        if _polyline_intersects(p, q):
            raise CrescentError(
                "boundary arc intersects its preimage away from the endpoints"
            )

    def dump_contours_csv(self, path, n=1000):
        lo, hi = self._clip_range()
        rs = np.geomspace(lo, hi, n)
        lam = self.boundary_point(rs)
        pre = self.finv_boundary(rs)
        A, B = self.strip_curves(rs)
        with open(path, "w") as fh:
            fh.write("# label, t, re, im\n")
            for label, vals in (
                ("boundary", lam),
                ("preimage", pre),
                ("strip_boundary", B),
                ("strip_preimage", A),
            ):
                for t, v in zip(rs, np.atleast_1d(vals)):
                    fh.write(f"{label}, {t:.17g}, {v.real:.17g}, {v.imag:.17g}\n")


def _polyline_intersects(p, q, chunk=64):
    """True if open polylines p and q cross (proper segment intersections)."""
    p0, p1 = p[:-1], p[1:]
    q0, q1 = q[:-1], q[1:]
    for start in range(0, p0.size, chunk):
        a0 = p0[start : start + chunk, None]
        a1 = p1[start : start + chunk, None]
        b0 = q0[None, :]
        b1 = q1[None, :]
        d1 = _cross(a1 - a0, b0 - a0)
        d2 = _cross(a1 - a0, b1 - a0)
        d3 = _cross(b1 - b0, a0 - b0)
        d4 = _cross(b1 - b0, a1 - b0)
        hit = (d1 * d2 < 0) & (d3 * d4 < 0)
        if np.any(hit):
            return True
    return False


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def build_crescent(f, tangent_slope=DEFAULT_TANGENT_SLOPE, validate=True,
                   table_size=6000):
    """Construct and validate the period-1 fundamental crescent of f."""
    return FundamentalCrescent(f, tangent_slope, table_size=table_size,
                               validate=validate)
