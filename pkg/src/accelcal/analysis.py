"""How wrong is the magnitude if the axes are assumed orthogonal?

Worst-case searches over the admissible axis angles, plus Monte-Carlo
histograms and threshold clouds of the relative error over a box of
accelerations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exceptions import DomainError
from .geometry import _nonorth_ratio, magnitude_nonorth, magnitude_orth
from .params import DEFAULT_ANGLE_TOL, HALF_PI, REFERENCE_ANGLES, STANDARD_GRAVITY, AxisAngles, angle_bounds

GRID_POINTS = 25
REFINE_STARTS = 10
_CHUNK = 1024


def abs_error(a, angles: AxisAngles):
    """|a_nonorth - a_orth| in the units of ``a``."""
    return np.abs(magnitude_nonorth(a, angles) - magnitude_orth(a))


def rel_error(a, angles: AxisAngles):
    """abs_error relative to the true magnitude; undefined at a = 0."""
    a = np.asarray(a, dtype=float)
    nonorth = magnitude_nonorth(a, angles)
    if np.any(nonorth == 0):
        raise DomainError("relative error is undefined for a zero acceleration")
    return np.abs(nonorth - magnitude_orth(a)) / nonorth


@dataclass
class ErrorProblemResult:
    max_value: float
    a: np.ndarray
    angles: AxisAngles
    evaluations: int
    problem: str = ""


def _direction(polar, azimuth):
    sp = np.sin(polar)
    return np.stack([sp * np.cos(azimuth), sp * np.sin(azimuth), np.cos(polar)], axis=-1)


class _ReducedSearch:
    """Maximise |1 - 1/a_nonorth(u)| over unit directions u and axis angles.

    Both worst-case problems reduce to this by homogeneity. Coordinates are
    (polar, azimuth, v_phi, v_psi, v_theta) with angle = pi/2 + w sin(v), so
    the angle box needs no explicit bounds and its corners stay reachable.
    """

    def __init__(self, tol: float):
        lo, hi = angle_bounds(tol, slack=0.0)
        self.half_width = 0.5 * (hi - lo)
        self.evaluations = 0

    def angles(self, x) -> AxisAngles:
        return AxisAngles.from_array(HALF_PI + self.half_width * np.sin(x[2:5]))

    def value(self, x) -> float:
        self.evaluations += 1
        u = _direction(x[0], x[1])
        return float(abs(1.0 - 1.0 / magnitude_nonorth(u, self.angles(x))))

    def grid(self, n: int):
        polar = np.linspace(0.0, math.pi, n)
        azimuth = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        v = np.linspace(-HALF_PI, HALF_PI, n) if self.half_width > 0 else np.zeros(1)
        pp, aa = np.meshgrid(polar, azimuth, indexing="ij")
        dirs = _direction(pp.ravel(), aa.ravel())
        vv = np.stack(np.meshgrid(v, v, v, indexing="ij"), axis=-1).reshape(-1, 3)
        cosines = np.sin(-self.half_width * np.sin(vv))

        values = np.empty((len(vv), len(dirs)))
        for start in range(0, len(vv), _CHUNK):
            c = cosines[start:start + _CHUNK]
            ratio = _nonorth_ratio(dirs[None, :, :], c[:, 0:1], c[:, 1:2], c[:, 2:3])
            values[start:start + _CHUNK] = np.abs(1.0 - 1.0 / np.sqrt(ratio))
        self.evaluations += values.size

        flat = values.ravel()
        k = min(REFINE_STARTS, flat.size)
        cutoff = np.partition(flat, flat.size - k)[flat.size - k]
        candidates = np.flatnonzero(flat >= cutoff)
        # highest value first, ties by grid index
        order = candidates[np.lexsort((candidates, -flat[candidates]))]
        points = []
        for idx in order[:k]:
            i_ang, i_dir = divmod(int(idx), len(dirs))
            points.append((np.array([pp.ravel()[i_dir], aa.ravel()[i_dir], *vv[i_ang]]), float(flat[idx])))
        return points

    def run(self, grid_points: int = GRID_POINTS):
        starts = self.grid(grid_points)
        best_x, best_f = starts[0]
        for x0, _ in starts:
            if self.half_width > 0:
                res = minimize(lambda x: -self.value(x), x0, method="Nelder-Mead",
                               options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 5000,
                                        "maxfev": 10000})
                x, f = res.x, -float(res.fun)
            else:
                res = minimize(lambda d: -self.value(np.concatenate([d, x0[2:]])), x0[:2],
                               method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16})
                x, f = np.concatenate([res.x, x0[2:]]), -float(res.fun)
            if f > best_f:
                best_x, best_f = x, f
        return best_x, best_f


def _check_tol(tol: float) -> None:
    if not 0.0 <= tol <= 0.1:
        raise DomainError(f"angle tolerance must lie in [0, 0.1], got {tol}")


def solve_problem1(g: float = STANDARD_GRAVITY, angle_tol: float = DEFAULT_ANGLE_TOL,
                   grid_points: int = GRID_POINTS) -> ErrorProblemResult:
    """Largest absolute error among accelerations whose true magnitude is g."""
    _check_tol(angle_tol)
    if g <= 0:
        raise DomainError("g must be positive")
    search = _ReducedSearch(angle_tol)
    x, _ = search.run(grid_points)
    angles = search.angles(x)
    u = _direction(x[0], x[1])
    a = g * u / magnitude_nonorth(u, angles)
    return ErrorProblemResult(float(abs_error(a, angles)), a, angles, search.evaluations, "max-error")


def solve_problem2(half_width: float = 16 * STANDARD_GRAVITY, angle_tol: float = DEFAULT_ANGLE_TOL,
                   grid_points: int = GRID_POINTS) -> ErrorProblemResult:
    """Largest relative error over the box [-half_width, half_width]^3.

    The objective is scale invariant, so the worst direction is pushed out
    to the box surface and the value does not depend on the box size.
    """
    _check_tol(angle_tol)
    if not half_width > 0:
        raise DomainError("box half-width must be positive")
    search = _ReducedSearch(angle_tol)
    x, _ = search.run(grid_points)
    angles = search.angles(x)
    u = _direction(x[0], x[1])
    a = u * (half_width / np.max(np.abs(u)))
    return ErrorProblemResult(float(rel_error(a, angles)), a, angles, search.evaluations, "relative-error")


@dataclass(frozen=True)
class HistogramSpec:
    angles: AxisAngles = REFERENCE_ANGLES
    half_width: float = 20.0
    samples: int = 1_000_000
    bins: int = 60
    seed: int = 42
    value_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.samples < 1 or self.bins < 1:
            raise ValueError("samples and bins must be at least 1")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    kept: int
    spec: HistogramSpec = field(repr=False, default_factory=HistogramSpec)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def sample_box(spec: HistogramSpec) -> tuple[np.ndarray, np.ndarray]:
    """Uniform accelerations in the cube and their relative errors.

    Points with norm below 1e-9 are dropped.
    """
    rng = np.random.default_rng(spec.seed)
    pts = rng.uniform(-spec.half_width, spec.half_width, size=(spec.samples, 3))
    pts = pts[magnitude_orth(pts) >= 1e-9]
    return pts, rel_error(pts, spec.angles)


def histogram(spec: HistogramSpec) -> Histogram:
    """Relative-error histogram over the sampled box.

    Bins are equal width over [0, max observed] unless ``value_range`` is
    given; values outside an explicit range are counted in the end bins.
    """
    _, err = sample_box(spec)
    if spec.value_range is not None:
        lo, hi = spec.value_range
    else:
        lo, hi = 0.0, float(err.max()) if len(err) else 0.0
    if not hi > lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, spec.bins + 1)
    counts, _ = np.histogram(np.clip(err, lo, hi), bins=edges)
    return Histogram(edges, counts, len(err), spec)


def gap_profile(hist: Histogram, gap: tuple[float, float] = (0.0145, 0.0155)) -> dict:
    """Smallest count among bins centred in ``gap`` and the peak count on each side."""
    c = hist.centers
    inside = (c >= gap[0]) & (c <= gap[1])
    left, right = c < gap[0], c > gap[1]
    return {
        "gap_min": int(hist.counts[inside].min()) if inside.any() else 0,
        "left_peak": int(hist.counts[left].max()) if left.any() else 0,
        "right_peak": int(hist.counts[right].max()) if right.any() else 0,
    }


@dataclass
class DomainCloud:
    threshold: float
    comparison: str
    points: np.ndarray
    rel_errors: np.ndarray
    kept: int


def domain_cloud(threshold: float, comparison: str = "le", spec: HistogramSpec | None = None,
                 max_points: int | None = None) -> DomainCloud:
    """Sampled accelerations whose relative error is <= (``le``) or >= (``ge``) the threshold.

    If more than ``max_points`` qualify, every k-th one is kept.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if comparison not in ("le", "ge"):
        raise ValueError(f"comparison must be 'le' or 'ge', got {comparison!r}")
    spec = spec or HistogramSpec()
    pts, err = sample_box(spec)
    mask = err <= threshold if comparison == "le" else err >= threshold
    pts, err = pts[mask], err[mask]
    if max_points is not None and len(pts) > max_points:
        step = math.ceil(len(pts) / max_points)
        pts, err = pts[::step], err[::step]
    return DomainCloud(threshold, comparison, pts, err, int(mask.size))
