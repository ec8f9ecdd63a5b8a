"""Closed-form geometry of an accelerometer triad with oblique axes.

Vectors come in four flavours that share the same numpy representation:

* raw          - sensor output before bias/scale correction
* measured     - per-axis values after bias/scale correction; these are the
                 orthogonal projections of the acceleration on each axis
* affine       - coordinates of the acceleration in the oblique axis basis
* orthonormal  - coordinates in the frame sharing the x axis and x-y plane

All functions accept a single 3-vector or a stack shaped (..., 3).
"""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError
from .params import AxisAngles, CalibrationParams

MIN_SIN = 0.9
MIN_GRAM_DET = 1e-6


def _det_from_cosines(cp, cs, ct):
    return 1.0 - cp * cp - cs * cs - ct * ct + 2.0 * cp * cs * ct


def gram_determinant(angles: AxisAngles) -> float:
    """1 - cos^2(phi) - cos^2(psi) - cos^2(theta) + 2 cos(phi) cos(psi) cos(theta)."""
    return float(_det_from_cosines(*angles.cosines()))


def _checked_cosines(angles: AxisAngles) -> np.ndarray:
    values = angles.as_array()
    if not np.all(np.isfinite(values)):
        raise DomainError(f"non-finite axis angles: {angles}")
    c = angles.cosines()
    if np.any(np.sqrt(1.0 - c * c) < MIN_SIN):
        raise DomainError(f"axis angles {angles} too far from a right angle")
    if _det_from_cosines(*c) < MIN_GRAM_DET:
        raise DomainError(f"Gram determinant of {angles} is not positive")
    return c


def gram_matrix(angles: AxisAngles) -> np.ndarray:
    """Inner products of the unit axis vectors."""
    cp, cs, ct = _checked_cosines(angles)
    return np.array([[1.0, cp, cs],
                     [cp, 1.0, ct],
                     [cs, ct, 1.0]])


def tbar_matrix(angles: AxisAngles) -> np.ndarray:
    """Closed-form inverse of the Gram matrix.

    Maps measured values to affine coordinates. The shared denominator is
    -det(G), matching the sign convention of the adjugate entries below.
    """
    cp, cs, ct = _checked_cosines(angles)
    den = -1.0 + cp * cp + cs * cs + ct * ct - 2.0 * cp * cs * ct
    m = np.array([
        [-(1.0 - ct * ct), cp - ct * cs, cs - cp * ct],
        [cp - ct * cs, -(1.0 - cs * cs), ct - cp * cs],
        [cs - cp * ct, ct - cp * cs, -(1.0 - cp * cp)],
    ])
    return m / den


def affine_from_measured(a, angles: AxisAngles) -> np.ndarray:
    """Oblique-basis coordinates of the acceleration whose axis projections are ``a``."""
    a = np.asarray(a, dtype=float)
    return a @ tbar_matrix(angles).T


def magnitude_orth(a) -> float | np.ndarray:
    """Magnitude under the (wrong) assumption of orthogonal axes."""
    a = np.asarray(a, dtype=float)
    return np.sqrt(np.sum(a * a, axis=-1))


def _nonorth_ratio(a: np.ndarray, cp, cs, ct):
    """numerator/denominator of the closed-form oblique magnitude, squared.

    cos(2x) is evaluated as 2cos^2(x) - 1 from the accurate cosines. Cosine
    arguments broadcast against the leading axes of ``a``.
    """
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    c2p = 2.0 * cp * cp - 1.0
    c2s = 2.0 * cs * cs - 1.0
    c2t = 2.0 * ct * ct - 1.0
    numerator = (2.0 * (-1.0 + c2t) * ax * ax
                 + 2.0 * (-1.0 + c2s) * ay * ay
                 + 2.0 * (-1.0 + c2p) * az * az
                 + 8.0 * (cp - cs * ct) * ax * ay
                 + 8.0 * (ct - cp * cs) * ay * az
                 + 8.0 * (cs - cp * ct) * ax * az)
    denominator = 2.0 + 2.0 * c2p + 2.0 * c2s + 2.0 * c2t - 8.0 * cp * cs * ct
    return numerator / denominator


def _safe_sqrt(ratio, a):
    ratio = np.asarray(ratio, dtype=float)
    scale = np.sum(np.asarray(a, dtype=float) ** 2, axis=-1)
    if np.any(ratio < -1e-12 * scale):
        raise DomainError("negative squared magnitude; angles or input are invalid")
    return np.sqrt(np.maximum(ratio, 0.0))


def magnitude_nonorth(a, angles: AxisAngles) -> float | np.ndarray:
    """True magnitude of the acceleration given its per-axis projections ``a``."""
    a = np.asarray(a, dtype=float)
    cp, cs, ct = _checked_cosines(angles)
    return _safe_sqrt(_nonorth_ratio(a, cp, cs, ct), a)


def magnitude_nonorth_affine(abar, angles: AxisAngles) -> float | np.ndarray:
    """Magnitude from oblique-basis coordinates: sqrt(abar^T G abar)."""
    abar = np.asarray(abar, dtype=float)
    cp, cs, ct = _checked_cosines(angles)
    x, y, z = abar[..., 0], abar[..., 1], abar[..., 2]
    q = (x * x + y * y + z * z
         + 2.0 * x * y * cp + 2.0 * x * z * cs + 2.0 * y * z * ct)
    return _safe_sqrt(q, abar)


def orthonormalization_matrix(angles: AxisAngles) -> np.ndarray:
    """Upper-triangular map from oblique coordinates to orthonormal ones.

    Column i holds axis vector e_i in the orthonormal frame (f1 = e1, f2 in
    the e1-e2 plane), so ``U.T @ U`` is the Gram matrix.
    """
    cp, cs, ct = _checked_cosines(angles)
    sp = np.sin(angles.phi)
    det = _det_from_cosines(cp, cs, ct)
    return np.array([
        [1.0, cp, cs],
        [0.0, sp, (ct - cp * cs) / sp],
        [0.0, 0.0, np.sqrt(det) / sp],
    ])


def correction_matrices(params: CalibrationParams) -> tuple[np.ndarray, np.ndarray]:
    """Return (M, offset) with orthonormal = M @ raw - offset."""
    params.check_scales()
    chain = orthonormalization_matrix(params.angles) @ tbar_matrix(params.angles)
    return chain @ params.scale_matrix(), chain @ params.shift_vector()


def correct_sample(raw, params: CalibrationParams) -> np.ndarray:
    """Raw sensor reading(s) to acceleration in the orthonormal frame."""
    raw = np.asarray(raw, dtype=float)
    m, offset = correction_matrices(params)
    return raw @ m.T - offset
