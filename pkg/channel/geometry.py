"""
Node placement and large-scale path loss.

Coordinates are in meters. The IRS is a uniform planar array in the x-z
plane; element m sits at row m // cols (z axis) and column m % cols
(x axis), counted from the (-x, -z) corner.
"""

from dataclasses import dataclass, replace

import numpy as np

from errors import NonPositiveDistanceError, ValidationError

Point = tuple[float, float, float]


@dataclass(frozen=True)
class Geometry:
    ap_pos: Point = (0.0, 1.0, 2.0)
    irs_center_pos: Point = (50.0, 0.0, 1.0)
    controller_pos: Point = (50.0, 0.3, 1.5)
    user_pos: Point = (50.0, 1.0, 1.0)
    irs_rows: int = 8
    irs_cols: int = 8
    element_spacing: float = 0.025
    wavelength: float = 0.05

    def __post_init__(self):
        if self.irs_rows < 1 or self.irs_cols < 1:
            raise ValidationError(f"IRS needs at least one row and column, got {self.irs_rows}x{self.irs_cols}")
        if self.element_spacing <= 0:
            raise ValidationError(f"element_spacing must be > 0, got {self.element_spacing}")
        if self.wavelength <= 0:
            raise ValidationError(f"wavelength must be > 0, got {self.wavelength}")
        for name in ("ap_pos", "irs_center_pos", "controller_pos", "user_pos"):
            pos = getattr(self, name)
            if len(pos) != 3 or not np.all(np.isfinite(pos)):
                raise ValidationError(f"{name} must be three finite coordinates, got {pos}")

    @property
    def m(self) -> int:
        return self.irs_rows * self.irs_cols

    def with_user_at(self, d0: float) -> "Geometry":
        """Same layout with the user moved to horizontal distance d0 (y, z kept)."""
        if d0 <= 0:
            raise NonPositiveDistanceError(f"d0 must be > 0, got {d0}")
        _, y, z = self.user_pos
        return replace(self, user_pos=(float(d0), y, z))


def array_shape_for(m: int) -> tuple[int, int]:
    """Most square rows x cols factorization of m (rows <= cols)."""
    if m < 1:
        raise ValidationError(f"IRS size must be >= 1, got {m}")
    rows = int(np.floor(np.sqrt(m)))
    while m % rows:
        rows -= 1
    return rows, m // rows


def distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def path_gain(gamma0_db: float, d: float, exponent: float) -> float:
    """Linear power gain γ0 / d^exponent with γ0 given in dB at 1 m."""
    if d <= 0:
        raise NonPositiveDistanceError(f"distance must be > 0, got {d}")
    return 10 ** (gamma0_db / 10) / d ** exponent


def upa_positions(geometry: Geometry) -> np.ndarray:
    """(M, 3) element coordinates, row-major, centered on irs_center_pos."""
    s = geometry.element_spacing
    rows, cols = geometry.irs_rows, geometry.irs_cols
    r, c = np.divmod(np.arange(rows * cols), cols)
    offsets = np.zeros((rows * cols, 3))
    offsets[:, 0] = (c - (cols - 1) / 2.0) * s
    offsets[:, 2] = (r - (rows - 1) / 2.0) * s
    return np.asarray(geometry.irs_center_pos, dtype=float) + offsets
