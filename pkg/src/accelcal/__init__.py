"""Calibration of three-axis accelerometers with non-orthogonal axes."""
from .analysis import (
    DomainCloud,
    ErrorProblemResult,
    Histogram,
    HistogramSpec,
    abs_error,
    domain_cloud,
    histogram,
    rel_error,
    solve_problem1,
    solve_problem2,
)
from .calibration import FitOptions, FitReport, PoseDataset, RawSample, fit, residuals
from .exceptions import AccelCalError, DomainError, IllPosedDatasetError, InputError, ParameterError
from .geometry import (
    affine_from_measured,
    correct_sample,
    gram_matrix,
    magnitude_nonorth,
    magnitude_nonorth_affine,
    magnitude_orth,
    orthonormalization_matrix,
    tbar_matrix,
)
from .params import (
    DEFAULT_ANGLE_TOL,
    REFERENCE_ANGLES,
    STANDARD_GRAVITY,
    AxisAngles,
    CalibrationParams,
)
from .synthetic import TruthScenario, fibonacci_directions, generate

__version__ = "0.1.0"
