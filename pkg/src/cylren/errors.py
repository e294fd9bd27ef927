"""Exception types shared across the package."""


class CylrenError(Exception):
    """Base class for numerical failures in the renormalization pipeline."""


class FixedPointError(CylrenError):
    """Newton search for a fixed point failed or found a non-repelling point."""


class OrbitEscapeError(CylrenError):
    """An orbit left the evaluation disk before completing the requested iterates."""

    def __init__(self, index, value):
        super().__init__(f"orbit escaped at iterate {index}: |z| = {abs(value):.6g}")
        self.index = index
        self.value = value


class BasisOverflowError(CylrenError):
    """Basis expansion would require powers beyond the stored truncation degree."""


class GridMismatchError(CylrenError):
    """Two polar fields do not share the same grid."""


class CrescentError(CylrenError):
    """Fundamental crescent construction or validation failed."""


class DegenerateGluingError(CylrenError):
    """The Beltrami-coefficient denominator vanished at a grid node."""


class NonContractionError(CylrenError):
    """The Beltrami fixed-point iteration stopped contracting."""


class InversionError(CylrenError):
    """Newton inversion of a forward map did not converge."""


class ContourError(CylrenError):
    """A renormalization contour failed a geometric sanity check."""


class SpectrumError(CylrenError):
    """Linearization matrix is unusable (non-finite or ill-formed)."""
