"""Polynomial Siegel maps fixing the origin, with their norms and bases.

A map is stored as a truncated Taylor series c_1 z + c_2 z^2 + ... + c_D z^D
together with the radius rho of the disk on which norms are measured.  Two
norms are provided: the weighted l1 norm sum |c_k| rho^k, and the l1 norm of
the expansion over the critically-normalized basis
    e_j = g_j / ||g_j||_rho,   g_j(z) = z^j - (j/(j+1)) z^(j+1),
whose members all have vanishing derivative at 1.
"""

from __future__ import annotations

import cmath
import json
import math

import numpy as np

from cylren.errors import BasisOverflowError, FixedPointError, OrbitEscapeError

# Fractional part of the golden mean; e^{2 pi i theta} only depends on this.
GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0
SIEGEL_MULTIPLIER = cmath.exp(2j * math.pi * GOLDEN_FRAC)

# Discretized critical normalization |f'(1)| tolerance.
CRIT_TOL = 1e-3


class AnalyticMap:
    """Immutable truncated Taylor series about 0 with c_0 = 0."""

    __slots__ = ("coeffs", "rho")

    def __init__(self, coeffs, rho):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence c_1..c_D")
        if not rho > 0:
            raise ValueError("rho must be positive")
        self.coeffs = coeffs.copy()
        self.coeffs.setflags(write=False)
        self.rho = float(rho)

    # -- basic structure ---------------------------------------------------

    @property
    def degree(self):
        return self.coeffs.size

    def c(self, k):
        """Taylor coefficient c_k (k >= 0); zero outside the stored range."""
        if k <= 0 or k > self.degree:
            return 0.0 + 0.0j
        return complex(self.coeffs[k - 1])

    def with_rho(self, rho):
        return AnalyticMap(self.coeffs, rho)

    def padded(self, degree):
        if degree < self.degree:
            raise ValueError("padded() cannot truncate")
        out = np.zeros(degree, dtype=complex)
        out[: self.degree] = self.coeffs
        return AnalyticMap(out, self.rho)

    def truncated(self, degree):
        return AnalyticMap(self.coeffs[:degree], self.rho)

    def __add__(self, other):
        d = max(self.degree, other.degree)
        a = self.padded(d).coeffs + other.padded(d).coeffs
        return AnalyticMap(a, self.rho)

    def __sub__(self, other):
        d = max(self.degree, other.degree)
        a = self.padded(d).coeffs - other.padded(d).coeffs
        return AnalyticMap(a, self.rho)

    def __mul__(self, scalar):
        return AnalyticMap(self.coeffs * scalar, self.rho)

    __rmul__ = __mul__

    def __repr__(self):
        return f"AnalyticMap(degree={self.degree}, rho={self.rho})"

    # -- evaluation --------------------------------------------------------

    def eval(self, z):
        """Evaluate by Horner's scheme; accepts scalars or arrays."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for ck in self.coeffs[::-1]:
            acc = acc * z + ck
        out = acc * z
        return out if out.ndim else complex(out)

    def __call__(self, z):
        return self.eval(z)

    def deriv(self, z):
        """Evaluate f'(z)."""
        z = np.asarray(z, dtype=complex)
        ks = np.arange(1, self.degree + 1)
        dcoef = self.coeffs * ks
        acc = np.zeros_like(z)
        for ck in dcoef[::-1]:
            acc = acc * z + ck
        return acc if acc.ndim else complex(acc)

    def deriv2(self, z):
        """Evaluate f''(z)."""
        z = np.asarray(z, dtype=complex)
        ks = np.arange(1, self.degree + 1)
        dcoef = (self.coeffs * ks * (ks - 1))[1:]
        acc = np.zeros_like(z)
        for ck in dcoef[::-1]:
            acc = acc * z + ck
        return acc if acc.ndim else complex(acc)

    def derivative_coeffs(self):
        """Coefficients of f' as a plain series (constant term first)."""
        ks = np.arange(1, self.degree + 1)
        return self.coeffs * ks

    def iterate(self, m, z, escape_radius=None):
        """Orbit [f(z), f^2(z), ..., f^m(z)]; optionally checks escape."""
        orbit = []
        w = complex(z)
        for i in range(m):
            w = self.eval(w)
            if escape_radius is not None and abs(w) > escape_radius:
                raise OrbitEscapeError(i + 1, w)
            orbit.append(w)
        return orbit

    # -- norms -------------------------------------------------------------

    def weighted_norm(self, rho=None):
        """sum_k |c_k| rho^k (dominates sup over the rho-disk)."""
        r = self.rho if rho is None else float(rho)
        ks = np.arange(1, self.degree + 1)
        return float(np.sum(np.abs(self.coeffs) * r**ks))

    def basis_norm(self, rho=None):
        """l1 norm of the expansion over the critically-normalized basis."""
        f, _ = self.basis_expand(rho=rho)
        return float(np.sum(np.abs(f)))

    # -- critically-normalized basis ----------------------------------------

    def basis_expand(self, rho=None):
        """Expand over e_j; returns (coefficients f_1..f_D, spill residual).

        The triangular back-substitution leaves a single term of order
        z^(D+1); its weighted norm is returned as the spill residual.
        """
        r = self.rho if rho is None else float(rho)
        return taylor_to_basis(self.coeffs, r)

    def project_leq(self, N):
        """Keep the e_1..e_N part of the basis expansion (degree N+1 output)."""
        f, _ = self.basis_expand()
        f = f[:N] if N < f.size else np.concatenate([f, np.zeros(N - f.size)])
        return basis_to_map(f, self.rho)

    def project_gt(self, N):
        """Complement P_{>N} f = f - P_{<=N} f."""
        low = self.project_leq(N)
        return self - low

    def project_stable(self):
        """Affine projection forcing the multiplier c_1 = e^{2 pi i theta}."""
        out = np.array(self.coeffs)
        out[0] = SIEGEL_MULTIPLIER
        return AnalyticMap(out, self.rho)

    # -- dynamics ----------------------------------------------------------

    def find_repelling_fixed_point(self, seed=None, tol=1e-13, max_iter=80):
        """Repelling fixed point nearest the seed; Newton-polished root.

        The origin is deflated away, all roots of (f(z) - z)/z are computed,
        and the repelling one closest to the seed (default: the exact fixed
        point 1 - e^{2 pi i theta} of the quadratic) is returned.
        """
        target = complex(seed) if seed is not None else 1.0 - SIEGEL_MULTIPLIER
        # roots of c_D z^(D-1) + ... + c_2 z + (c_1 - 1)
        poly = np.concatenate([self.coeffs[::-1][:-1], [self.coeffs[0] - 1.0]])
        roots = np.roots(poly)
        rep = roots[np.abs(self.deriv(roots)) > 1.0]
        if rep.size == 0:
            raise FixedPointError("map has no repelling fixed point")
        # roots outside the disk of analyticity are truncation artifacts;
        # trust them only when no genuine candidate exists
        inside = rep[np.abs(rep) <= self.rho]
        if inside.size:
            z = complex(inside[np.argmin(np.abs(inside))])
        else:
            z = complex(rep[np.argmin(np.abs(rep - target))])
        for _ in range(max_iter):
            step = (self.eval(z) - z) / (self.deriv(z) - 1.0)
            z = z - step
            if abs(step) < tol:
                break
        else:
            raise FixedPointError("Newton polish did not converge")
        if abs(self.eval(z) - z) > 1e-9:
            raise FixedPointError("Newton stalled away from a fixed point")
        if abs(self.deriv(z)) <= 1.0:
            raise FixedPointError(
                f"fixed point at {z:.6g} is not repelling: |f'| = {abs(self.deriv(z)):.6g}"
            )
        return z

    def is_critically_normalized(self, tol=CRIT_TOL):
        return abs(np.sum(self.coeffs * np.arange(1, self.degree + 1))) <= tol

    def is_on_stable_slice(self):
        return self.coeffs[0] == SIEGEL_MULTIPLIER

    # -- persistence ---------------------------------------------------------

    def to_json_dict(self):
        return {
            "rho": self.rho,
            "theta_frac": GOLDEN_FRAC,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, data):
        if "c0" in data and complex(*data["c0"]) != 0:
            raise ValueError("map files must have c_0 = 0 (maps fix the origin)")
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        return cls(coeffs, data["rho"])

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


# -- basis machinery (module level, shared with the spectrum code) ----------


def basis_norm_const(j, rho):
    """Weighted norm of g_j(z) = z^j - (j/(j+1)) z^(j+1)."""
    return rho**j + j / (j + 1.0) * rho ** (j + 1)


def basis_map(j, rho):
    """The unit basis vector e_j as an AnalyticMap of degree j+1."""
    if j < 1:
        raise ValueError("basis index must be >= 1")
    c = np.zeros(j + 1, dtype=complex)
    n = basis_norm_const(j, rho)
    c[j - 1] = 1.0 / n
    c[j] = -(j / (j + 1.0)) / n
    return AnalyticMap(c, rho)


def monomial_map(j, rho):
    """The monomial coordinate vector h_j(z) = z^j / rho^j."""
    c = np.zeros(j, dtype=complex)
    c[j - 1] = 1.0 / rho**j
    return AnalyticMap(c, rho)


def taylor_to_basis(coeffs, rho):
    """Triangular solve of c = sum_j b_j g_j; returns (f_j = b_j ||g_j||, spill).

    The spill is the weighted norm of the dropped z^(D+1) term.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    D = coeffs.size
    if D == 0:
        raise BasisOverflowError("empty coefficient vector")
    b = np.zeros(D, dtype=complex)
    b[0] = coeffs[0]
    for j in range(2, D + 1):
        b[j - 1] = coeffs[j - 1] + (j - 1) / j * b[j - 2]
    f = b * np.array([basis_norm_const(j, rho) for j in range(1, D + 1)])
    spill = abs(b[D - 1]) * D / (D + 1.0) * rho ** (D + 1)
    return f, spill


def basis_to_map(f, rho):
    """Reassemble sum_j f_j e_j into Taylor coefficients (degree D+1)."""
    f = np.asarray(f, dtype=complex)
    D = f.size
    b = f / np.array([basis_norm_const(j, rho) for j in range(1, D + 1)])
    c = np.zeros(D + 1, dtype=complex)
    for j in range(1, D + 1):
        c[j - 1] += b[j - 1]
        c[j] += -(j / (j + 1.0)) * b[j - 1]
    return AnalyticMap(c, rho)


def quadratic_siegel_map(rho=2.266):
    """The golden-mean Siegel quadratic z^2 + e^{2 pi i theta} z."""
    return AnalyticMap([SIEGEL_MULTIPLIER, 1.0], rho)


def reference_fixed_point():
    """The stored degree-10 renormalization fixed-point map."""
    from importlib.resources import files

    data = json.loads(files("cylren").joinpath("data/fhat.json").read_text())
    return AnalyticMap.from_json_dict(data)
