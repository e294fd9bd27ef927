"""Functions on the plane stored as per-radius angular Fourier coefficients.

A PolarField keeps, for every radius r_i of a strictly increasing grid, the
coefficients h_k(r_i) of h(r e^{i phi}) = sum_k h_k(r) e^{i k phi} for
k = -N/2 .. N/2-1.  The angular grid is equispaced with a configurable
offset (a half-cell offset keeps grid nodes off the branch cut of the
strip map).  Modes are stored in FFT order along axis 1.
"""

from __future__ import annotations

import numpy as np

from cylren.errors import GridMismatchError


def default_radii(R, M, r_min_factor=1e-3):
    """Geometric radial grid from R*r_min_factor up to R."""
    return np.geomspace(R * r_min_factor, R, M)


class PolarField:
    """Immutable per-radius Fourier representation of a planar function."""

    __slots__ = ("radii", "coeffs", "support_radius", "phi0", "n_modes")

    def __init__(self, radii, coeffs, support_radius, phi0=0.0):
        radii = np.asarray(radii, dtype=float)
        coeffs = np.asarray(coeffs, dtype=complex)
        if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
            raise ValueError("radii must be strictly increasing and positive")
        if coeffs.shape[0] != radii.size:
            raise ValueError("coeffs must have one row per radius")
        N = coeffs.shape[1]
        if N & (N - 1) != 0:
            raise ValueError("number of angular modes must be a power of two")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if radii[-1] < support_radius * (1 - 1e-12):
            raise ValueError("outermost radius must reach the support radius")
        self.radii = radii.copy()
        self.coeffs = coeffs.copy()
        self.radii.setflags(write=False)
        self.coeffs.setflags(write=False)
        self.support_radius = float(support_radius)
        self.phi0 = float(phi0)
        self.n_modes = N

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_samples(cls, samples, radii, support_radius, phi0=0.0):
        """Angular DFT per radius row, normalized so constants give h_0."""
        samples = np.asarray(samples, dtype=complex)
        N = samples.shape[1]
        if N & (N - 1) != 0:
            raise ValueError("number of angular samples must be a power of two")
        coeffs = np.fft.fft(samples, axis=1) / N
        if phi0 != 0.0:
            coeffs = coeffs * np.exp(-1j * mode_numbers(N) * phi0)[None, :]
        return cls(radii, coeffs, support_radius, phi0=phi0)

    def to_samples(self):
        """Inverse of from_samples on the same grid."""
        c = self.coeffs
        if self.phi0 != 0.0:
            c = c * np.exp(1j * mode_numbers(self.n_modes) * self.phi0)[None, :]
        return np.fft.ifft(c * self.n_modes, axis=1)

    def angles(self):
        return self.phi0 + 2.0 * np.pi * np.arange(self.n_modes) / self.n_modes

    def modes(self):
        """Mode numbers in storage (FFT) order."""
        return mode_numbers(self.n_modes)

    def same_grid(self, other):
        return (
            self.n_modes == other.n_modes
            and self.radii.size == other.radii.size
            and np.allclose(self.radii, other.radii)
            and self.phi0 == other.phi0
        )

    def with_coeffs(self, coeffs):
        return PolarField(self.radii, coeffs, self.support_radius, self.phi0)

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def _check(self, other):
        if not self.same_grid(other):
            raise GridMismatchError("polar fields live on different grids")

    # -- evaluation ------------------------------------------------------------

    def eval(self, z, return_flag=False):
        """Interpolate modes linearly in r and sum at arg z.

        Radii outside [r_1, r_M] are clamped to the nearest grid row and
        flagged as extrapolated.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r = np.abs(z)
        phi = np.angle(z)
        flag = (r < self.radii[0]) | (r > self.radii[-1])
        rows = self._interp_rows(r)
        k = mode_numbers(self.n_modes)
        vals = np.einsum("pk,pk->p", rows, np.exp(1j * np.outer(phi, k)))
        if return_flag:
            return (vals, flag) if vals.size > 1 else (complex(vals[0]), bool(flag[0]))
        return vals if vals.size > 1 else complex(vals[0])

    def _interp_rows(self, r):
        """Linearly interpolated coefficient rows at the requested radii."""
        r = np.clip(r, self.radii[0], self.radii[-1])
        idx = np.searchsorted(self.radii, r, side="right") - 1
        idx = np.clip(idx, 0, self.radii.size - 2)
        r0 = self.radii[idx]
        r1 = self.radii[idx + 1]
        t = ((r - r0) / (r1 - r0))[:, None]
        return (1.0 - t) * self.coeffs[idx] + t * self.coeffs[idx + 1]

    # -- diagnostics -----------------------------------------------------------

    def parseval_residual(self):
        """Max over radii of the relative Parseval defect of the rows."""
        s = self.to_samples()
        lhs = np.sum(np.abs(self.coeffs) ** 2, axis=1)
        rhs = np.mean(np.abs(s) ** 2, axis=1)
        scale = np.maximum(np.maximum(lhs, rhs), 1e-300)
        return float(np.max(np.abs(lhs - rhs) / scale))

    def lp_norm(self, p):
        """Discrete L_p norm over the annulus covered by the grid."""
        s = np.abs(self.to_samples()) ** p
        w = _radial_weights(self.radii) * (2.0 * np.pi / self.n_modes)
        return float(np.sum(s * w[:, None]) ** (1.0 / p))

    def dump_csv(self, path):
        """Coefficient dump: header + rows `k, r_index, re, im`."""
        with open(path, "w") as fh:
            fh.write(
                f"# radii:{self.radii.size} modes:{self.n_modes} "
                f"R:{self.support_radius}\n"
            )
            ks = mode_numbers(self.n_modes)
            for i in range(self.radii.size):
                for j, k in enumerate(ks):
                    c = self.coeffs[i, j]
                    fh.write(f"{k}, {i}, {c.real!r}, {c.imag!r}\n")

    def dump_samples_csv(self, path):
        with open(path, "w") as fh:
            fh.write("# r, phi, re, im\n")
            s = self.to_samples()
            for i, r in enumerate(self.radii):
                for j, phi in enumerate(self.angles()):
                    fh.write(f"{r!r}, {phi!r}, {s[i, j].real!r}, {s[i, j].imag!r}\n")


def mode_numbers(N):
    """Integer mode numbers in FFT storage order: 0..N/2-1, -N/2..-1."""
    return np.fft.fftfreq(N, d=1.0 / N).astype(int)


def pointwise_product(a_samples, b_samples):
    """Sample-space product; grids must match (O(NM) per grid)."""
    a = np.asarray(a_samples)
    b = np.asarray(b_samples)
    if a.shape != b.shape:
        raise GridMismatchError("sample grids differ in shape")
    return a * b


def _radial_weights(radii):
    """Trapezoid weights for integr. of f(r) r dr on the grid."""
    r = radii
    w = np.zeros_like(r)
    dr = np.diff(r)
    w[:-1] += dr / 2.0
    w[1:] += dr / 2.0
    return w * r
