"""Planar Hilbert and Cauchy transforms via per-mode radial integrals.

For a field h(r e^{i phi}) = sum_k h_k(r) e^{i k phi} compactly supported in
the disk of radius R, the transforms act mode by mode:

  Cauchy    p_k(r) =  2 int_0^r (r/rho)^k h_{k+1}(rho) d rho          (k < 0)
            p_k(r) = -2 int_r^R (r/rho)^k h_{k+1}(rho) d rho          (k >= 0)

  Hilbert   c_k(r) = A_k int_0^r (r/rho)^k h_{k+2}(rho)/rho d rho
                   + B_k int_r^R (r/rho)^k h_{k+2}(rho)/rho d rho
                   + h_{k+2}(r),
            A_k = 2(k+1) for k < 0 else 0;  B_k = -2(k+1) for k >= 0 else 0.

The integrals are evaluated in closed form over the piecewise-linear radial
interpolant with a stable cumulative recursion from radius to radius; the
kernel powers are always ratios <= 1, computed in the log domain so that
large |k| cannot overflow.
"""

from __future__ import annotations

import numpy as np

from cylren.polar_field import PolarField, mode_numbers

HOLDER_DECAY_EXPONENT = 1.5


def _ratio_pow(ratio, t):
    """ratio**t elementwise via exp(t log ratio); flushes underflow to 0."""
    with np.errstate(under="ignore", over="raise"):
        return np.exp(t * np.log(ratio))


def _moment(a, b, s, q, m):
    """int_a^b (rho/s)^q rho^m d rho for scalar a < b, s in {a, b}, array q."""
    t = q + m + 1.0
    out = np.empty_like(t)
    logb = np.log(b / s)
    loga = np.log(a / s)
    with np.errstate(under="ignore"):
        num = np.exp(t * logb) - np.exp(t * loga)
    nz = t != 0
    out[nz] = s ** (m + 1) / t[nz] * num[nz]
    out[~nz] = s ** (m + 1) * np.log(b / a)
    return out


class _HalfPlan:
    """Cached segment weights for one integration direction.

    Each segment contributes J_i = alpha_i * w(a) + beta_i * w(b) to the
    cumulative integral, where w is the node value of h; the 1/rho density
    used by the Hilbert transform is folded into the weights.
    """

    def __init__(self, radii, k, outward, over_rho):
        radii = np.asarray(radii, dtype=float)
        k = np.asarray(k, dtype=float)
        M = radii.size
        K = k.size
        self.alpha = np.zeros((M - 1, K))
        self.beta = np.zeros((M - 1, K))
        self.decay = np.zeros((M - 1, K))
        self.outward = outward
        q = -k if outward else k  # exponent of (rho/s); q >= 0 either way
        for i in range(M - 1):
            a, b = radii[i], radii[i + 1]
            dlt = b - a
            if outward:
                s, qq = b, q  # kernel (rho/b)^q, q = -k >= 1
            else:
                s, qq = a, -q  # kernel (rho/a)^(-k), k >= 0
            m0 = _moment(a, b, s, qq, 0)
            if over_rho:
                mm1 = _moment(a, b, s, qq, -1)
                beta = (m0 - a * mm1) / dlt
                alpha = mm1 - beta
            else:
                m1 = _moment(a, b, s, qq, 1)
                beta = (m1 - a * m0) / dlt
                alpha = m0 - beta
            self.alpha[i] = alpha
            self.beta[i] = beta
            self.decay[i] = _ratio_pow(radii[i] / radii[i + 1], q)
        r1 = radii[0]
        if outward:
            # constant extension of h on [0, r_1]
            self.origin = (r1 / (q + 1.0)) if not over_rho else (1.0 / q)
        else:
            self.origin = None

    def apply(self, w):
        """Cumulative integrals at every radius; w is (M, K) node values."""
        M = self.alpha.shape[0] + 1
        out = np.zeros((M, w.shape[1]), dtype=complex)
        if self.outward:
            out[0] = self.origin * w[0]
            for i in range(M - 1):
                out[i + 1] = self.decay[i] * out[i] + (
                    self.alpha[i] * w[i] + self.beta[i] * w[i + 1]
                )
        else:
            for i in range(M - 2, -1, -1):
                out[i] = self.decay[i] * out[i + 1] + (
                    self.alpha[i] * w[i] + self.beta[i] * w[i + 1]
                )
        return out


class TransformPlan:
    """Precomputed radial weights for both transforms on a fixed grid."""

    def __init__(self, radii, n_modes):
        self.radii = np.asarray(radii, dtype=float)
        self.n_modes = n_modes
        k = mode_numbers(n_modes)
        self.neg = k < 0
        self.pos = ~self.neg
        self.k = k
        self.cauchy_out = _HalfPlan(radii, k[self.neg], True, False)
        self.cauchy_in = _HalfPlan(radii, k[self.pos], False, False)
        self.hilbert_out = _HalfPlan(radii, k[self.neg], True, True)
        self.hilbert_in = _HalfPlan(radii, k[self.pos], False, True)

    def matches(self, field):
        return field.n_modes == self.n_modes and np.array_equal(
            field.radii, self.radii
        )


def _plan_for(field, plan):
    if plan is None or not plan.matches(field):
        plan = TransformPlan(field.radii, field.n_modes)
    return plan


def _shifted_density(h, shift):
    """Input coefficients h_{k+shift} aligned with output mode k (FFT order)."""
    N = h.shape[1]
    d = np.roll(h, -shift, axis=1)
    for s in range(1, shift + 1):
        d[:, (N // 2 - s) % N] = 0.0  # mode N/2 - s + shift is not stored
    return d


def cauchy_transform(h, plan=None):
    """The d-bar potential P[h] as a PolarField on the same grid."""
    plan = _plan_for(h, plan)
    dens = _shifted_density(h.coeffs, 1)
    out = np.zeros_like(h.coeffs)
    out[:, plan.neg] = 2.0 * plan.cauchy_out.apply(dens[:, plan.neg])
    out[:, plan.pos] = -2.0 * plan.cauchy_in.apply(dens[:, plan.pos])
    return h.with_coeffs(out)


def hilbert_transform(h, plan=None):
    """The principal-value transform T[h] = d_z P[h] on the same grid."""
    plan = _plan_for(h, plan)
    dens = _shifted_density(h.coeffs, 2)
    out = np.zeros_like(h.coeffs)
    kneg = plan.k[plan.neg]
    kpos = plan.k[plan.pos]
    out[:, plan.neg] = (2.0 * (kneg + 1.0)) * plan.hilbert_out.apply(
        dens[:, plan.neg]
    )
    out[:, plan.pos] = (-2.0 * (kpos + 1.0)) * plan.hilbert_in.apply(
        dens[:, plan.pos]
    )
    out += dens
    return h.with_coeffs(out)


def cauchy_at_zero(h):
    """P[h](0) = -2 int_0^R h_1(rho) d rho (constant extension below r_1)."""
    pos1 = 1 % h.n_modes
    h1 = h.coeffs[:, pos1]
    integral = np.trapezoid(h1, h.radii) + h1[0] * h.radii[0]
    return -2.0 * complex(integral)


def hilbert_at_zero(h):
    """c_0(0) = -2 lim int_eps^R h_2(rho)/rho d rho.

    Below r_1 the integrand is approximated by linear decay of h_2 toward 0;
    returns (value, diverged_flag) where the flag marks a non-negligible
    h_2(r_1) that makes the true limit ill-defined at the grid scale.
    """
    h2 = h.coeffs[:, 2 % h.n_modes]
    integral = np.trapezoid(h2 / h.radii, h.radii) + h2[0]
    scale = max(float(np.max(np.abs(h2))), 1e-300)
    diverged = abs(h2[0]) > 1e-6 * scale
    return -2.0 * complex(integral), bool(diverged)


def holder_decay_warning(h):
    """True when angular modes decay slower than |k|^-1.5 (heuristic)."""
    k = np.abs(mode_numbers(h.n_modes)).astype(float)
    mask = k >= 4
    if not np.any(mask):
        return False
    amp = np.max(np.abs(h.coeffs), axis=0)
    base = max(float(np.max(amp)), 1e-300)
    tail = amp[mask] / base
    return bool(np.any(tail > 5.0 * k[mask] ** (-HOLDER_DECAY_EXPONENT)))


class TransformEvaluator:
    """Pointwise evaluation of a transform, valid also off the grid annulus.

    kind='cauchy':  outside the support the negative modes continue as
    (r/R)^k Laurent tails and the non-negative ones vanish; below r_1 the
    modes are interpolated linearly toward their exact r = 0 limits.
    kind='hilbert': outside, c_k(r) = (r/R)^k (c_k(R) - h_{k+2}(R)) for
    k < 0 and 0 otherwise; at r = 0 only c_0 survives.
    """

    def __init__(self, out_field, src_field, kind):
        if kind not in ("cauchy", "hilbert"):
            raise ValueError("kind must be 'cauchy' or 'hilbert'")
        self.field = out_field
        self.kind = kind
        self.k = mode_numbers(out_field.n_modes)
        self.neg = self.k < 0
        rM = out_field.radii[-1]
        if kind == "cauchy":
            self.outer = np.where(self.neg, out_field.coeffs[-1], 0.0)
            self.zero_row = np.zeros(out_field.n_modes, dtype=complex)
            self.zero_row[0] = cauchy_at_zero(src_field)
        else:
            dens = _shifted_density(src_field.coeffs, 2)
            self.outer = np.where(self.neg, out_field.coeffs[-1] - dens[-1], 0.0)
            self.zero_row = np.zeros(out_field.n_modes, dtype=complex)
            self.zero_row[0], self.diverged_at_zero = hilbert_at_zero(src_field)
        self.rM = rM

    def eval(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r = np.abs(z)
        phi = np.angle(z)
        f = self.field
        rows = np.empty((z.size, f.n_modes), dtype=complex)
        inner = r < f.radii[0]
        outer = r > self.rM
        mid = ~(inner | outer)
        if np.any(mid):
            rows[mid] = f._interp_rows(r[mid])
        if np.any(inner):
            t = (r[inner] / f.radii[0])[:, None]
            rows[inner] = (1.0 - t) * self.zero_row[None, :] + t * f.coeffs[0]
        if np.any(outer):
            rows[outer] = 0.0
            kneg = -self.k[self.neg].astype(float)
            scale = _ratio_pow((self.rM / r[outer])[:, None], kneg[None, :])
            rows[np.ix_(outer, self.neg)] = self.outer[None, self.neg] * scale
        vals = np.einsum("pk,pk->p", rows, np.exp(1j * np.outer(phi, self.k)))
        return vals if vals.size > 1 else complex(vals[0])


def cauchy_evaluator(h, plan=None):
    return TransformEvaluator(cauchy_transform(h, plan), h, "cauchy")


def hilbert_evaluator(h, plan=None):
    return TransformEvaluator(hilbert_transform(h, plan), h, "hilbert")
