"""Synthetic static-pose datasets generated from known calibration parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .calibration import PoseDataset
from .exceptions import ParameterError
from .geometry import gram_matrix, orthonormalization_matrix
from .params import STANDARD_GRAVITY, CalibrationParams

_MASK64 = (1 << 64) - 1
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def counter_uniform(seed: int, stream: int, counter: int) -> float:
    """Uniform variate in the open interval (0, 1) keyed by (seed, stream, counter).

    Each key is hashed independently with SplitMix64, so any variate can be
    regenerated without replaying the ones before it.
    """
    key = _splitmix64(_splitmix64(_splitmix64(seed & _MASK64) ^ (stream & _MASK64)) ^ (counter & _MASK64))
    return ((key >> 11) + 0.5) / float(1 << 53)


def gaussian_triple(seed: int, stream: int) -> np.ndarray:
    """Three standard normal variates via Box-Muller on counters 0..3."""
    out = []
    for pair in range(2):
        u1 = counter_uniform(seed, stream, 2 * pair)
        u2 = counter_uniform(seed, stream, 2 * pair + 1)
        r = math.sqrt(-2.0 * math.log(u1))
        out.extend((r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)))
    return np.array(out[:3])


def fibonacci_directions(n: int) -> np.ndarray:
    """n near-uniform unit vectors on the sphere (spherical Fibonacci lattice)."""
    if n < 1:
        raise ValueError(f"need at least one direction, got {n}")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(1.0 - z * z)
    lon = i * _GOLDEN_ANGLE
    d = np.column_stack([r * np.cos(lon), r * np.sin(lon), z])
    return d / np.linalg.norm(d, axis=1, keepdims=True)


@dataclass
class TruthScenario:
    params: CalibrationParams
    directions: np.ndarray
    g: float = STANDARD_GRAVITY
    noise_std: float = 0.0
    seed: int = 42

    def __post_init__(self):
        self.directions = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if self.directions.shape[-1] != 3:
            raise ValueError("pose directions must be 3-vectors")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("pose directions must be unit vectors")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.g <= 0:
            raise ValueError("g must be positive")


def generate(scenario: TruthScenario) -> PoseDataset:
    """Raw readings that the sensor described by ``scenario.params`` would report.

    Gravity g*d in the orthonormal frame is carried back through the oblique
    basis, projected on each axis, then scaled and shifted into raw units.
    Noise for pose k uses stream k of the counter generator.
    """
    params = scenario.params
    params.check_scales()
    if np.any(params.scales < 0):
        raise ParameterError(f"scale coefficients must be positive, got {params.b}")
    upper = orthonormalization_matrix(params.angles)
    orth = scenario.g * scenario.directions
    affine = solve_triangular(upper, orth.T, lower=False).T
    measured = affine @ gram_matrix(params.angles).T
    raw = measured * params.scales + params.shifts
    if scenario.noise_std > 0:
        noise = np.stack([gaussian_triple(scenario.seed, k) for k in range(len(raw))])
        raw = raw + scenario.noise_std * noise
    return PoseDataset(raw)
