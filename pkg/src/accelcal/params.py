"""Parameter types shared by the geometry, calibration and CLI layers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, ParameterError

HALF_PI = math.pi / 2
DEFAULT_ANGLE_TOL = 0.02
STANDARD_GRAVITY = 9.80665
# reference angles are quoted to 5 decimals and 1.53938 < 0.98*pi/2 by 4e-7
ANGLE_SLACK = 1e-6


@dataclass(frozen=True)
class AxisAngles:
    """Angles between the sensing axes, in radians.

    phi is the x-y angle, psi the x-z angle and theta the y-z angle.
    """

    phi: float
    psi: float
    theta: float

    @classmethod
    def orthogonal(cls) -> "AxisAngles":
        return cls(HALF_PI, HALF_PI, HALF_PI)

    @classmethod
    def from_array(cls, values) -> "AxisAngles":
        phi, psi, theta = (float(v) for v in values)
        return cls(phi, psi, theta)

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.psi, self.theta], dtype=float)

    def cosines(self) -> np.ndarray:
        """Cosines of (phi, psi, theta).

        Evaluated as sin(pi/2 - x) so that a float right angle gives an exact
        zero and near-right angles keep full relative precision.
        """
        return np.sin(HALF_PI - self.as_array())

    def in_range(self, tol: float = DEFAULT_ANGLE_TOL) -> bool:
        lo, hi = angle_bounds(tol)
        return all(lo <= x <= hi for x in (self.phi, self.psi, self.theta))

    def check_range(self, tol: float = DEFAULT_ANGLE_TOL) -> None:
        if not all(math.isfinite(x) for x in (self.phi, self.psi, self.theta)):
            raise DomainError(f"non-finite axis angles: {self}")
        if not self.in_range(tol):
            lo, hi = angle_bounds(tol)
            raise DomainError(f"axis angles {self} outside [{lo!r}, {hi!r}] (tol={tol})")


def angle_bounds(tol: float = DEFAULT_ANGLE_TOL, slack: float = ANGLE_SLACK) -> tuple[float, float]:
    """Allowed interval for each inter-axis angle: (pi/2)(1 -/+ tol), widened by ``slack`` rad."""
    if tol < 0:
        raise DomainError(f"angle tolerance must be non-negative, got {tol}")
    return HALF_PI * (1.0 - tol) - slack, HALF_PI * (1.0 + tol) + slack


# angles estimated for the reference sensor; also the default for histograms
REFERENCE_ANGLES = AxisAngles(1.53938, 1.60221, 1.60221)


@dataclass(frozen=True)
class CalibrationParams:
    """Shifts s, scale coefficients b and inter-axis angles.

    The per-axis model is a_i = (raw_i - s_i) / b_i.
    """

    s: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b: tuple[float, float, float] = (1.0, 1.0, 1.0)
    angles: AxisAngles = field(default_factory=AxisAngles.orthogonal)

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(float(v) for v in self.s))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.s) != 3 or len(self.b) != 3:
            raise ParameterError("s and b must have three components each")

    @classmethod
    def identity(cls) -> "CalibrationParams":
        return cls()

    @property
    def shifts(self) -> np.ndarray:
        return np.array(self.s, dtype=float)

    @property
    def scales(self) -> np.ndarray:
        return np.array(self.b, dtype=float)

    def scale_matrix(self) -> np.ndarray:
        """T = diag(1/b1, 1/b2, 1/b3)."""
        self.check_scales()
        return np.diag(1.0 / self.scales)

    def shift_vector(self) -> np.ndarray:
        """(s1/b1, s2/b2, s3/b3), the offset subtracted after scaling."""
        self.check_scales()
        return self.shifts / self.scales

    def check_scales(self) -> None:
        b = self.scales
        if np.any(b == 0.0):
            raise ParameterError(f"scale coefficients must be non-zero, got {self.b}")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(self.shifts))):
            raise ParameterError("calibration parameters must be finite")

    def validate(self, tol: float = DEFAULT_ANGLE_TOL) -> None:
        self.check_scales()
        if np.any(self.scales < 0):
            raise ParameterError(f"scale coefficients must be positive, got {self.b}")
        try:
            self.angles.check_range(tol)
        except DomainError as exc:
            raise ParameterError(str(exc)) from exc

    def as_vector(self) -> np.ndarray:
        """Flat (s1, s2, s3, b1, b2, b3, phi, psi, theta)."""
        return np.concatenate([self.shifts, self.scales, self.angles.as_array()])

    @classmethod
    def from_vector(cls, v) -> "CalibrationParams":
        v = [float(x) for x in v]
        return cls(tuple(v[0:3]), tuple(v[3:6]), AxisAngles(*v[6:9]))
