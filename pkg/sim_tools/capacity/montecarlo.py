# smmimo_sim/sim_tools/capacity/montecarlo.py
"""
Monte Carlo ergodic capacity, the SNR x alpha sweep and alpha calibration.

Trials may run on a thread pool; results are collected by trial index
and reduced in ascending order, so the thread count never changes a
number. Every grid cell reuses the same trial draws.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
import pandas as pd

from core.exceptions import CalibrationError, CapacityInputError, NumericalFailure
from core.logger import get_logger, trial_logger
from sim_tools.capacity.channel import ChannelModel, MaskMode, build_mask, draw_channel, pathloss_gain
from sim_tools.capacity.model import capacity_from_gram, effective_snr, gram, vc_capacity
from sim_tools.topology.config import ScenarioConfig
from sim_tools.topology.scenario import build_scenario

logger = get_logger("capacity.montecarlo")

CURVE_COLUMNS = ["snr_db", "alpha", "mu", "mask_mode", "capacity_bps_hz", "std_error", "trials", "seed"]

T = TypeVar("T")


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def _indexed_map(fn: Callable[[int], T], count: int, threads: int) -> List[T]:
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class CapacityPoint:
    snr_db: float
    alpha: float
    mu: float
    mean_capacity: float
    std_error: float
    trials: int
    mask_mode: str = "full"
    seed: int = 0


def _reduce(values: Sequence[float], snr_db: float, alpha: float, mu: float,
            mask_mode: str, seed: int) -> CapacityPoint:
    results = np.asarray(values, dtype=np.float64)
    return CapacityPoint(
        snr_db=float(snr_db),
        alpha=float(alpha),
        mu=float(mu),
        mean_capacity=float(results.mean()),
        std_error=float(results.std(ddof=1) / np.sqrt(results.size)),
        trials=int(results.size),
        mask_mode=mask_mode,
        seed=seed,
    )


def _trial_gram(M: int, K: int, seed: int, trial_index: int, mu: float, mask_mode: MaskMode,
                model: ChannelModel, gain: Optional[np.ndarray]) -> np.ndarray:
    H = draw_channel(M, K, seed, trial_index, model, gain).H
    # iid: instantaneous |h|^2 decides; pathloss: geometry decides
    power = np.abs(H) ** 2 if model == "iid" else gain
    return gram(H * build_mask(power, mu, mask_mode))


def ergodic_capacity(
    M: int,
    K: int,
    snr_db: float,
    alpha: float,
    mu: float,
    k_interferers: float,
    trials: int,
    seed: int,
    *,
    mask_mode: MaskMode = "full",
    model: ChannelModel = "iid",
    gain: Optional[np.ndarray] = None,
    threads: int = 1,
) -> CapacityPoint:
    """
    Mean and standard error of vc_capacity over independent draws.

    Raises:
        CapacityInputError: If trials < 2
        NumericalFailure: With the index of the failing trial
    """
    if trials < 2:
        raise CapacityInputError(f"trials must be >= 2 (got {trials})")
    rho = db_to_linear(snr_db)
    started = time.perf_counter()

    def one(trial_index: int) -> float:
        H = draw_channel(M, K, seed, trial_index, model, gain).H
        power = np.abs(H) ** 2 if model == "iid" else gain
        try:
            return vc_capacity(H, build_mask(power, mu, mask_mode), rho, alpha, k_interferers)
        except NumericalFailure as exc:
            raise NumericalFailure(exc.details["reason"], trial_index=trial_index) from exc

    point = _reduce(_indexed_map(one, trials, threads), snr_db, alpha, mu, mask_mode, seed)
    trial_logger.log_point(snr_db, alpha, trials, time.perf_counter() - started, component="capacity.ergodic")
    return point


# ============================================================
# Sweep
# ============================================================

@dataclass
class CapacityCurve:
    points: List[CapacityPoint] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (p.snr_db, p.alpha, p.mu, p.mask_mode, p.mean_capacity, p.std_error, p.trials, p.seed)
            for p in self.points
        ]
        return pd.DataFrame(rows, columns=CURVE_COLUMNS)

    def alphas(self) -> List[float]:
        return sorted({p.alpha for p in self.points})

    def series(self, alpha: float) -> List[CapacityPoint]:
        return sorted((p for p in self.points if p.alpha == alpha), key=lambda p: p.snr_db)

    def at(self, snr_db: float, alpha: float) -> CapacityPoint:
        return next(p for p in self.points if p.snr_db == snr_db and p.alpha == alpha)


@dataclass
class TrialGrams:
    """Per-trial Gram matrices of one VC; the grid only changes rho_eff."""
    grams: List[np.ndarray]
    M: int
    K: int
    seed: int
    mu: float
    mask_mode: str

    def evaluate(self, snr_db: float, alpha: float, k_interferers: float) -> CapacityPoint:
        rho_eff = effective_snr(db_to_linear(snr_db), alpha, k_interferers)
        values = []
        for trial_index, G in enumerate(self.grams):
            try:
                values.append(capacity_from_gram(G, rho_eff))
            except NumericalFailure as exc:
                raise NumericalFailure(exc.details["reason"], trial_index=trial_index) from exc
        return _reduce(values, snr_db, alpha, self.mu, self.mask_mode, self.seed)


def trial_grams(config: ScenarioConfig, seed: int, threads: int = 1) -> TrialGrams:
    """
    Draw every trial once for the reference VC of config.

    iid: M = antennas_per_pn, K = ut_count // pn_count. pathloss: PN 0's
    antennas and the K UTs nearest PN 0 (ties by UT id), rho being the
    SNR at the reference distance.
    """
    if config.mc_trials < 2:
        raise CapacityInputError(f"trials must be >= 2 (got {config.mc_trials})")
    M = config.antennas_per_pn
    K = config.users_per_cell
    gain = None
    if config.channel_model == "pathloss":
        scenario = build_scenario(config, seed)
        to_pn0 = np.hypot(*(scenario.ut_positions - scenario.pn_positions[0]).T)
        nearest = np.lexsort((np.arange(to_pn0.size), to_pn0))[:K]
        K = nearest.size
        if K == 0:
            raise CapacityInputError("pathloss model needs at least one UT")
        antenna_xy = scenario.antenna_positions[scenario.antennas_of_pn(0)]
        gain = pathloss_gain(antenna_xy, scenario.ut_positions[nearest], config.pathloss_exponent)
    if K < 1:
        raise CapacityInputError(f"virtual cell has no UTs (ut_count={config.ut_count}, pn_count={config.pn_count})")

    grams = _indexed_map(
        lambda t: _trial_gram(M, K, seed, t, config.mu, config.mask_mode, config.channel_model, gain),
        config.mc_trials,
        threads,
    )
    return TrialGrams(grams=grams, M=M, K=K, seed=seed, mu=config.mu, mask_mode=config.mask_mode)


def curve_from_grams(cache: TrialGrams, config: ScenarioConfig) -> CapacityCurve:
    """Evaluate the (alpha asc, snr asc) grid of config on cached draws."""
    return CapacityCurve([
        cache.evaluate(snr_db, alpha, config.interferers)
        for alpha in sorted(config.alpha_list)
        for snr_db in sorted(config.snr_grid_db)
    ])


def sweep_curve(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    threads: int = 1,
    cache: Optional[TrialGrams] = None,
) -> CapacityCurve:
    """
    One CapacityPoint per (alpha, snr) cell, rows in (alpha asc, snr asc) order.

    A cache from trial_grams is reused as is (calibration shares it).

    Raises:
        CapacityInputError: If trials < 2 or the VC is empty
    """
    seed = config.seed if seed is None else seed
    started = time.perf_counter()
    if cache is None:
        cache = trial_grams(config, seed, threads)
    curve = curve_from_grams(cache, config)
    trial_logger.log_sweep(len(curve.points), config.mc_trials, time.perf_counter() - started)
    logger.info(
        f"Sweep: M={cache.M}, K={cache.K}, k_interferers={config.interferers}, {config.channel_model}/{config.mask_mode}",
        extra={"seed": seed, "trials": config.mc_trials},
    )
    return curve


# ============================================================
# Calibration
# ============================================================

@dataclass(frozen=True)
class Calibration:
    alpha: float
    point: CapacityPoint
    target: float
    iterations: int


def calibrate_alpha(
    cache: TrialGrams,
    target: float,
    snr_db: float,
    k_interferers: float,
    *,
    tol: float = 1e-5,
    max_iter: int = 60,
) -> Calibration:
    """
    Bisect alpha in (0, 1] so mean capacity at snr_db hits target.

    Capacity is nonincreasing in alpha, so the bracket [lo, hi] keeps
    capacity(lo) >= target >= capacity(hi).

    Raises:
        CalibrationError: If target lies outside [capacity(1), capacity(0)]
    """
    def mean_at(alpha: float) -> float:
        return cache.evaluate(snr_db, alpha, k_interferers).mean_capacity

    top, bottom = mean_at(0.0), mean_at(1.0)
    if target > top:
        raise CalibrationError(target, f"above the isolated-cell capacity {top:.3f}")
    if target < bottom:
        raise CalibrationError(target, f"below the full-interference capacity {bottom:.3f}")

    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo > tol and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if mean_at(mid) >= target:
            lo = mid
        else:
            hi = mid
        iterations += 1

    alpha = hi
    point = cache.evaluate(snr_db, alpha, k_interferers)
    logger.info(
        f"Calibrated alpha*={alpha:.6f}: {point.mean_capacity:.2f} bps/Hz (target {target})",
        extra={"snr_db": snr_db, "alpha": alpha},
    )
    return Calibration(alpha=alpha, point=point, target=target, iterations=iterations)
