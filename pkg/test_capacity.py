# smmimo_sim/test_capacity.py
"""
Virtual cell capacity, Monte Carlo sweep and alpha calibration tests
"""
import math

import numpy as np
import pytest

from core.exceptions import CalibrationError, CapacityInputError, NumericalFailure
from sim_tools.capacity.chart import render_capacity_svg
from sim_tools.capacity.channel import build_mask, draw_channel
from sim_tools.capacity.model import capacity_from_gram, effective_snr, vc_capacity
from sim_tools.capacity.montecarlo import (
    calibrate_alpha,
    curve_from_grams,
    db_to_linear,
    ergodic_capacity,
    sweep_curve,
    trial_grams,
)
from sim_tools.topology.config import CALIBRATED_ALPHA, ScenarioConfig

REFERENCE_TRIALS = 200


@pytest.fixture(scope="module")
def reference_config() -> ScenarioConfig:
    return ScenarioConfig(mc_trials=REFERENCE_TRIALS, seed=2024)


@pytest.fixture(scope="module")
def reference_cache(reference_config):
    """M=1000, K=100, k_interferers=100 reference cell, 200 trials."""
    return trial_grams(reference_config, reference_config.seed)


def eigen_capacity(H, mask, rho, alpha, k):
    Hm = H if mask is None else H * mask
    eig = np.linalg.eigvalsh(Hm.conj().T @ Hm)
    return float(np.sum(np.log2(1.0 + effective_snr(rho, alpha, k) * np.clip(eig, 0.0, None))))


# ============================================================
# Single realization
# ============================================================

def test_scalar_capacity():
    assert vc_capacity(np.array([[1.0 + 0j]]), None, 10.0, 0.0, 0) == pytest.approx(math.log2(11))


def test_log_det_matches_eigen_oracle():
    rng = np.random.default_rng(10)
    for i in range(100):
        M, K = int(rng.integers(1, 65)), int(rng.integers(1, 33))
        H = rng.normal(size=(M, K)) + 1j * rng.normal(size=(M, K))
        mask = None if i % 2 else rng.uniform(size=(M, K)) < 0.6
        rho, alpha, k = float(rng.uniform(0.1, 100)), float(rng.uniform(0, 1)), float(rng.integers(0, 50))
        expected = eigen_capacity(H, mask, rho, alpha, k)
        got = vc_capacity(H, mask, rho, alpha, k)
        if expected == 0.0:
            assert got == 0.0
        else:
            assert abs(got - expected) / expected < 1e-10


def test_zero_snr_gives_zero_capacity():
    H = draw_channel(8, 4, 1, 0).H
    assert vc_capacity(H, None, 0.0, 0.5, 4) == 0.0


def test_empty_mask_gives_zero_capacity():
    H = draw_channel(8, 4, 1, 0).H
    assert vc_capacity(H, np.zeros((8, 4), dtype=bool), 10.0, 0.5, 4) == 0.0


def test_invalid_inputs():
    H = draw_channel(4, 2, 1, 0).H
    with pytest.raises(CapacityInputError):
        vc_capacity(H, None, 10.0, 1.5, 2)
    with pytest.raises(CapacityInputError):
        vc_capacity(H, None, -1.0, 0.5, 2)
    with pytest.raises(CapacityInputError):
        draw_channel(0, 2, 1, 0)


def test_nan_gram_is_a_numerical_failure():
    with pytest.raises(NumericalFailure):
        capacity_from_gram(np.full((2, 2), np.nan), 1.0)


def test_channel_draw_is_reproducible():
    a = draw_channel(16, 4, 77, 3).H
    b = draw_channel(16, 4, 77, 3).H
    assert np.array_equal(a, b)
    assert not np.array_equal(a, draw_channel(16, 4, 77, 4).H)


def test_mu_mask():
    power = np.array([[4.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
    mask = build_mask(power, 0.5)
    assert mask[:, 0].tolist() == [True, False, True]
    assert not mask[:, 1].any()
    assert build_mask(power, 0.5, "full").all()


# ============================================================
# Reference operating points
# ============================================================

def test_classical_baseline_matches_analytic(reference_cache):
    rho = db_to_linear(10.0)
    analytic = 100 * math.log2(1 + rho * 1000 / (1 + rho * 100))
    point = reference_cache.evaluate(10.0, 1.0, 100)
    assert abs(point.mean_capacity - analytic) / analytic < 0.05


def test_calibrated_alpha_reaches_operating_point(reference_cache):
    point = reference_cache.evaluate(10.0, CALIBRATED_ALPHA, 100)
    assert 810.0 <= point.mean_capacity <= 990.0
    assert point.std_error < 0.01 * point.mean_capacity


def test_calibration_bisects_to_target(reference_cache):
    calibration = calibrate_alpha(reference_cache, 900.0, 10.0, 100)
    assert 0.0 < calibration.alpha <= 1.0
    assert calibration.point.mean_capacity == pytest.approx(900.0, rel=0.01)
    assert abs(calibration.alpha - CALIBRATED_ALPHA) < 0.005


def test_calibration_out_of_range(reference_cache):
    with pytest.raises(CalibrationError):
        calibrate_alpha(reference_cache, 1e6, 10.0, 100)
    with pytest.raises(CalibrationError):
        calibrate_alpha(reference_cache, 1.0, 10.0, 100)


def test_reference_curve_family(reference_cache, reference_config):
    curve = curve_from_grams(reference_cache, reference_config)
    assert all(p.trials == REFERENCE_TRIALS for p in curve.points)
    for point in curve.points:
        assert point.std_error < 0.01 * point.mean_capacity
    alphas = curve.alphas()
    for alpha in alphas:
        values = [p.mean_capacity for p in curve.series(alpha)]
        assert values == sorted(values)
    for snr in reference_config.snr_grid_db:
        by_alpha = [curve.at(snr, a).mean_capacity for a in alphas]
        assert by_alpha == sorted(by_alpha, reverse=True)


# ============================================================
# Sweep
# ============================================================

@pytest.fixture
def sweep_config() -> ScenarioConfig:
    return ScenarioConfig(
        antennas_per_pn=64,
        ut_count=64,
        alpha_list=[1.0, 0.5, 0.1, CALIBRATED_ALPHA],
        snr_grid_db=[-10.0, 0.0, 10.0, 20.0],
        mc_trials=10,
        seed=5,
    )


def test_curve_shape_and_order(sweep_config):
    curve = sweep_curve(sweep_config)
    frame = curve.to_frame()
    assert len(frame) == 4 * 4
    assert list(frame["alpha"]) == sorted(frame["alpha"])
    assert list(frame.columns[:2]) == ["snr_db", "alpha"]


def test_curve_is_monotone(sweep_config):
    curve = sweep_curve(sweep_config)
    alphas = curve.alphas()
    for alpha in alphas:
        values = [p.mean_capacity for p in curve.series(alpha)]
        assert values == sorted(values)
    for snr in sweep_config.snr_grid_db:
        by_alpha = [curve.at(snr, a).mean_capacity for a in alphas]
        assert by_alpha == sorted(by_alpha, reverse=True)
        # alpha=1 is the floor of the family
        assert curve.at(snr, 1.0).mean_capacity == min(by_alpha)


def test_thread_count_does_not_change_results(sweep_config):
    one = sweep_curve(sweep_config, threads=1).to_frame()
    many = sweep_curve(sweep_config, threads=8).to_frame()
    assert one.equals(many)


def test_mu_mask_mode_lowers_capacity(sweep_config):
    full = sweep_curve(sweep_config).at(10.0, 0.1).mean_capacity
    masked = sweep_curve(sweep_config.model_copy(update={"mask_mode": "mu", "mu": 0.5})).at(10.0, 0.1).mean_capacity
    assert masked < full


def test_ergodic_capacity_matches_sweep_cell(sweep_config):
    point = ergodic_capacity(64, 16, 10.0, 0.5, 0.5, 16, 10, 5, threads=3)
    assert point.mean_capacity == pytest.approx(sweep_curve(sweep_config).at(10.0, 0.5).mean_capacity, rel=1e-12)
    with pytest.raises(CapacityInputError):
        ergodic_capacity(4, 2, 10.0, 0.5, 0.5, 2, 1, 5)


def test_pathloss_sweep(sweep_config):
    config = sweep_config.model_copy(update={"channel_model": "pathloss", "snr_grid_db": [0.0, 10.0]})
    curve = sweep_curve(config)
    assert len(curve.points) == 4 * 2
    assert all(p.mean_capacity >= 0.0 for p in curve.points)


def test_svg_is_self_contained(sweep_config):
    svg = render_capacity_svg(sweep_curve(sweep_config))
    assert svg.startswith("<svg")
    assert "<script" not in svg
    assert svg.count("<polyline") == 4
