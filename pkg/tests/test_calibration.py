import numpy as np
import pytest

from accelcal import (
    AxisAngles,
    CalibrationParams,
    FitOptions,
    IllPosedDatasetError,
    InputError,
    ParameterError,
    PoseDataset,
    RawSample,
    TruthScenario,
    fibonacci_directions,
    fit,
    generate,
    residuals,
)
from accelcal.params import angle_bounds

G = 9.80665


def _dataset(params, n=24, noise=0.0, seed=42):
    return generate(TruthScenario(params, fibonacci_directions(n), noise_std=noise, seed=seed))


# residuals

def test_residuals_identity_sensor_on_gravity_sphere():
    ds = PoseDataset(G * fibonacci_directions(12))
    np.testing.assert_allclose(residuals(ds, CalibrationParams()), 0.0, atol=1e-14)


def test_residuals_invariant_under_consistent_rescaling(truth_params):
    dirs = fibonacci_directions(12)
    ds1 = _dataset(truth_params, 12)
    # a sensor with doubled scale sees doubled raw values around its own shift
    doubled = CalibrationParams(truth_params.s, tuple(2 * b for b in truth_params.b), truth_params.angles)
    ds2 = generate(TruthScenario(doubled, dirs))
    off = CalibrationParams(truth_params.s, truth_params.b, AxisAngles(1.56, 1.58, 1.575))
    off2 = CalibrationParams(doubled.s, doubled.b, off.angles)
    np.testing.assert_allclose(residuals(ds1, off), residuals(ds2, off2), rtol=0, atol=1e-12)
    np.testing.assert_allclose(residuals(ds2, doubled), 0.0, atol=1e-12)


def test_residual_axis_aligned_pose():
    params = CalibrationParams((0.3, -0.1, 0.2), (1.1, 0.9, 1.05))
    ds = PoseDataset([[0.3, -0.1, G * 1.05 + 0.2]])
    assert abs(residuals(ds, params)[0]) < 1e-14


def test_residuals_reject_invalid_params():
    ds = PoseDataset([[0.0, 0.0, G]])
    with pytest.raises(ParameterError):
        residuals(ds, CalibrationParams(b=(1, 0, 1)))
    with pytest.raises(ParameterError):
        residuals(ds, CalibrationParams(angles=AxisAngles(1.3, 1.57, 1.57)))
    with pytest.raises(InputError):
        residuals(PoseDataset(np.empty((0, 3))), CalibrationParams())


def test_pose_dataset_from_raw_samples():
    ds = PoseDataset.from_samples([RawSample(1, 2, 3), RawSample(4, 5, 6)])
    assert len(ds) == 2
    with pytest.raises(InputError):
        PoseDataset([[1.0, 2.0]])
    with pytest.raises(InputError):
        PoseDataset([[1.0, np.inf, 2.0]])


# fit

def test_fit_recovers_truth_noiseless(truth_params):
    report = fit(_dataset(truth_params))
    assert report.converged
    assert np.max(np.abs(report.params.as_vector() - truth_params.as_vector())) < 1e-6
    assert report.residual_rms < 1e-8


def test_fit_identity_sensor():
    report = fit(PoseDataset(G * fibonacci_directions(24)))
    expected = CalibrationParams().as_vector()
    assert np.max(np.abs(report.params.as_vector() - expected)) < 1e-8


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_fit_noiseless_random_truth(seed):
    rng = np.random.default_rng(seed)
    lo, hi = angle_bounds(0.02, slack=0)
    truth = CalibrationParams(tuple(rng.normal(0, 0.3, 3)), tuple(rng.uniform(0.9, 1.1, 3)),
                              AxisAngles(*rng.uniform(lo, hi, 3)))
    report = fit(_dataset(truth, 20))
    assert report.residual_rms < 1e-8
    assert np.max(np.abs(report.params.as_vector() - truth.as_vector())) < 1e-6


def test_fit_raw_units_far_from_si():
    # 16-bit style sensor: ~1670 LSB per m/s^2 and large offsets
    truth = CalibrationParams((120.0, -340.0, 55.0), (1671.0, 1650.0, 1702.0), AxisAngles(1.58, 1.56, 1.59))
    report = fit(_dataset(truth, 24))
    assert report.converged
    np.testing.assert_allclose(report.params.as_vector(), truth.as_vector(), rtol=1e-7, atol=1e-6)


def test_fit_too_few_poses(truth_params):
    with pytest.raises(InputError):
        fit(_dataset(truth_params, 8))


def test_fit_ill_posed_when_orientations_repeat():
    # twelve poses but only the six axis-aligned orientations
    six = np.vstack([np.eye(3), -np.eye(3)]) * G
    with pytest.raises(IllPosedDatasetError):
        fit(PoseDataset(np.vstack([six, six])))


def test_fit_iteration_cap_returns_best_unconverged(truth_params):
    report = fit(_dataset(truth_params), options=FitOptions(max_iterations=2))
    assert not report.converged
    assert report.iterations == 2
    assert report.residual_rms < np.sqrt(2 * report.cost_history[0] / 24)


def test_fit_objective_monotone(truth_params):
    report = fit(_dataset(truth_params, noise=0.05, seed=9))
    history = np.array(report.cost_history)
    assert np.all(np.diff(history) <= 0)


@pytest.mark.parametrize("tol", [0.005, 0.02, 0.05])
def test_fit_angles_within_bounds(truth_params, tol):
    report = fit(_dataset(truth_params, noise=0.1, seed=4), options=FitOptions(angle_tol=tol))
    lo, hi = angle_bounds(tol)
    assert np.all((report.params.angles.as_array() >= lo) & (report.params.angles.as_array() <= hi))


def test_fit_pose_order_invariant(truth_params):
    ds = _dataset(truth_params, noise=0.05, seed=11)
    perm = np.random.default_rng(0).permutation(len(ds))
    a = fit(ds)
    b = fit(PoseDataset(ds.samples[perm]))
    assert np.max(np.abs(a.params.as_vector() - b.params.as_vector())) < 1e-12
    np.testing.assert_allclose(a.residuals[perm], b.residuals, atol=1e-12)


def test_fit_report_rms_matches_residuals(truth_params):
    ds = _dataset(truth_params, noise=0.05, seed=2)
    report = fit(ds)
    assert report.residual_rms == pytest.approx(np.sqrt(np.mean(report.residuals ** 2)), rel=1e-14)
    np.testing.assert_allclose(report.residuals, residuals(ds, report.params), atol=1e-12)


def test_fit_restarts_deterministic_and_no_worse(truth_params):
    ds = _dataset(truth_params, noise=0.1, seed=5)
    opts = FitOptions(restarts=3, seed=7)
    a, b = fit(ds, options=opts), fit(ds, options=opts)
    assert np.array_equal(a.params.as_vector(), b.params.as_vector())
    assert a.restart == b.restart
    assert a.residual_rms <= fit(ds).residual_rms + 1e-12


def test_fit_with_pinned_angles():
    truth = CalibrationParams((0.2, 0.1, -0.3), (1.05, 0.97, 1.0))
    report = fit(_dataset(truth), options=FitOptions(angle_tol=0.0))
    assert report.params.angles == AxisAngles.orthogonal()
    assert np.max(np.abs(report.params.as_vector() - truth.as_vector())) < 1e-8
