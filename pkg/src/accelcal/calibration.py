"""Nine-parameter calibration from static poses.

At rest the only acceleration is gravity, so every pose contributes one
residual: the oblique-frame magnitude of its bias/scale-corrected reading
minus g. Shifts, scale coefficients and the three inter-axis angles are found
by damped Gauss-Newton on the sum of squared residuals.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, IllPosedDatasetError, InputError, ParameterError
from .geometry import magnitude_nonorth
from .params import DEFAULT_ANGLE_TOL, HALF_PI, STANDARD_GRAVITY, AxisAngles, CalibrationParams, angle_bounds

log = logging.getLogger(__name__)

MIN_POSES = 9


class RawSample(NamedTuple):
    ax_hat: float
    ay_hat: float
    az_hat: float


@dataclass
class PoseDataset:
    """Mean raw reading for each static orientation, one row per pose."""

    samples: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.size == 0:
            samples = samples.reshape(0, 3)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise InputError(f"pose samples must have shape (n, 3), got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InputError("pose samples must be finite")
        self.samples = samples
        if self.counts is not None:
            self.counts = np.asarray(self.counts, dtype=int)
            if self.counts.shape != (len(samples),):
                raise InputError("counts must have one entry per pose")

    @classmethod
    def from_samples(cls, samples) -> "PoseDataset":
        return cls(np.array([tuple(s) for s in samples], dtype=float))

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 200
    tolerance: float = 1e-10
    restarts: int = 0
    seed: int = 42
    angle_tol: float = DEFAULT_ANGLE_TOL
    fd_step: float = 1e-6
    condition_threshold: float = 1e8


@dataclass
class FitReport:
    params: CalibrationParams
    residual_rms: float
    iterations: int
    converged: bool
    residuals: np.ndarray
    cost_history: list[float] = field(default_factory=list)
    restart: int = 0

    @property
    def pose_count(self) -> int:
        return len(self.residuals)


def residuals(dataset: PoseDataset, params: CalibrationParams,
              g: float = STANDARD_GRAVITY, angle_tol: float = DEFAULT_ANGLE_TOL) -> np.ndarray:
    """Per-pose gravity-magnitude residuals in m/s^2."""
    if len(dataset) == 0:
        raise InputError("dataset is empty")
    params.validate(angle_tol)
    measured = (dataset.samples - params.shifts) / params.scales
    try:
        return magnitude_nonorth(measured, params.angles) - g
    except DomainError as exc:
        raise ParameterError(str(exc)) from exc


class _Model:
    """Unconstrained coordinates: s, log b, and atanh-scaled angle offsets.

    angle = pi/2 + w * tanh(u), with w the half-width of the allowed band,
    keeps every angle inside its bounds. With tol == 0 the angles are pinned
    at pi/2 and only six coordinates are free.
    """

    def __init__(self, samples: np.ndarray, g: float, tol: float):
        self.samples = samples
        self.g = g
        self.size = 9 if tol > 0 else 6
        lo, hi = angle_bounds(tol)
        self.half_width = 0.5 * (hi - lo)

    def to_params(self, p: np.ndarray) -> CalibrationParams:
        if self.size == 9:
            angles = HALF_PI + self.half_width * np.tanh(p[6:9])
        else:
            angles = np.full(3, HALF_PI)
        return CalibrationParams(tuple(p[0:3]), tuple(np.exp(p[3:6])), AxisAngles.from_array(angles))

    def from_params(self, params: CalibrationParams) -> np.ndarray:
        p = np.concatenate([params.shifts, np.log(params.scales)])
        if self.size == 9:
            frac = (params.angles.as_array() - HALF_PI) / self.half_width
            p = np.concatenate([p, np.arctanh(np.clip(frac, -1 + 1e-12, 1 - 1e-12))])
        return p

    def residuals(self, p: np.ndarray) -> np.ndarray:
        params = self.to_params(p)
        measured = (self.samples - params.shifts) / params.scales
        return magnitude_nonorth(measured, params.angles) - self.g

    def jacobian(self, p: np.ndarray, rel_step: float) -> np.ndarray:
        jac = np.empty((len(self.samples), self.size))
        for j in range(self.size):
            h = rel_step * max(abs(p[j]), 1.0)
            hi, lo = p.copy(), p.copy()
            hi[j] += h
            lo[j] -= h
            jac[:, j] = (self.residuals(hi) - self.residuals(lo)) / (2.0 * h)
        return jac


def _initial_params(samples: np.ndarray, g: float) -> CalibrationParams:
    unit = samples / np.linalg.norm(samples, axis=1, keepdims=True)
    if np.min(unit @ unit.T) < -0.9:
        s = 0.5 * (samples.max(axis=0) + samples.min(axis=0))
    else:
        s = np.zeros(3)
    b = np.max(np.linalg.norm(samples - s, axis=1)) / g
    if not b > 0:
        raise IllPosedDatasetError("all poses coincide with the estimated bias")
    return CalibrationParams(tuple(s), (b, b, b), AxisAngles.orthogonal())


def _condition(jac: np.ndarray) -> float:
    norms = np.linalg.norm(jac, axis=0)
    if np.any(norms == 0):
        return math.inf
    return float(np.linalg.cond(jac / norms))


def _levenberg_marquardt(model: _Model, p0: np.ndarray, opts: FitOptions):
    p = p0.copy()
    r = model.residuals(p)
    cost = 0.5 * float(r @ r)
    history = [cost]
    lam = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        jac = model.jacobian(p, opts.fd_step)
        grad = jac.T @ r
        # column-normalised so a saturated angle coordinate cannot stop the fit early
        col_norms = np.maximum(np.linalg.norm(jac, axis=0), 1e-300)
        if np.max(np.abs(grad) / col_norms) < opts.tolerance:
            converged = True
            break
        jtj = jac.T @ jac
        damping = np.maximum(np.diag(jtj), 1e-12)
        while True:
            step = np.linalg.solve(jtj + lam * np.diag(damping), -grad)
            if np.max(np.abs(step)) < opts.tolerance:
                converged = True
                break
            trial = p + step
            r_trial = model.residuals(trial)
            cost_trial = 0.5 * float(r_trial @ r_trial)
            if cost_trial < cost:
                p, r, cost = trial, r_trial, cost_trial
                history.append(cost)
                lam = max(lam / 3.0, 1e-15)
                break
            lam *= 4.0
        if converged:
            break
    else:
        iterations = opts.max_iterations
    return p, cost, iterations, converged, history


def fit(dataset: PoseDataset, g: float = STANDARD_GRAVITY,
        options: FitOptions | None = None) -> FitReport:
    """Least-squares estimate of shifts, scale coefficients and axis angles.

    Raises InputError for fewer than nine poses and IllPosedDatasetError when
    the poses do not pin down all parameters. Hitting the iteration cap is
    not an error: the best parameters come back with ``converged=False``.
    """
    opts = options or FitOptions()
    n = len(dataset)
    if n < MIN_POSES:
        raise InputError(f"need at least {MIN_POSES} poses, got {n}")
    if g <= 0:
        raise InputError("g must be positive")
    if not 0 <= opts.angle_tol <= 0.1:
        raise InputError(f"angle tolerance must lie in [0, 0.1], got {opts.angle_tol}")

    # canonical row order makes the result independent of pose ordering
    order = np.lexsort(dataset.samples.T[::-1])
    samples = dataset.samples[order]
    model = _Model(samples, g, opts.angle_tol)

    start = _initial_params(samples, g)
    p_start = model.from_params(start)
    cond = _condition(model.jacobian(p_start, opts.fd_step))
    if cond > opts.condition_threshold:
        raise IllPosedDatasetError(
            f"pose set does not determine all parameters (condition estimate {cond:.3g})")

    best = None
    for k in range(opts.restarts + 1):
        p0 = p_start.copy()
        if k > 0:
            rng = np.random.default_rng([opts.seed, k])
            jitter = rng.normal(size=model.size)
            p0[0:3] += 0.05 * g * start.scales * jitter[0:3]
            p0[3:6] += 0.05 * jitter[3:6]
            p0[6:] += 0.5 * jitter[6:]
        result = _levenberg_marquardt(model, p0, opts)
        log.debug("restart %d: cost=%g iterations=%d", k, result[1], result[2])
        if best is None or result[1] < best[1][1]:
            best = (k, result)

    k, (p, _cost, iterations, converged, history) = best
    params = model.to_params(p)
    r_sorted = model.residuals(p)
    r = np.empty_like(r_sorted)
    r[order] = r_sorted
    return FitReport(
        params=params,
        residual_rms=float(np.sqrt(np.mean(r * r))),
        iterations=iterations,
        converged=converged,
        residuals=r,
        cost_history=history,
        restart=k,
    )
