# smmimo_sim/sim_tools/capacity/channel.py
"""Rayleigh channel draws and the mu serving mask."""

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from core.exceptions import CapacityInputError
from core.rng import complex_gaussian_matrix
from sim_tools.dbm.pilot import meets_acceptance, received_power

ChannelModel = Literal["iid", "pathloss"]
MaskMode = Literal["full", "mu"]


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray
    seed: int
    trial_index: int
    model: ChannelModel

    @property
    def shape(self):
        return self.H.shape


def pathloss_gain(antenna_xy: np.ndarray, ut_xy: np.ndarray, gamma: float) -> np.ndarray:
    """M x K large-scale gain (max(d, d_min) / d_ref) ** -gamma."""
    distances = np.linalg.norm(antenna_xy[:, None, :] - ut_xy[None, :, :], axis=2)
    return received_power(1.0, distances, gamma)


def draw_channel(
    M: int,
    K: int,
    seed: int,
    trial_index: int,
    model: ChannelModel = "iid",
    gain: Optional[np.ndarray] = None,
) -> ChannelRealization:
    """
    Draw one M x K channel.

    Entry (m, k) depends only on (seed, trial_index, m, k). In pathloss
    mode the unit-variance draw is scaled by sqrt(gain).

    Raises:
        CapacityInputError: On empty dimensions or a missing/mis-shaped gain
    """
    if M < 1 or K < 1:
        raise CapacityInputError(f"channel needs M, K >= 1 (got {M}x{K})")
    H = complex_gaussian_matrix(seed, trial_index, M, K)
    if model == "pathloss":
        if gain is None or gain.shape != (M, K):
            raise CapacityInputError(f"pathloss model needs an {M}x{K} gain matrix")
        H = H * np.sqrt(gain)
    return ChannelRealization(H=H, seed=seed, trial_index=trial_index, model=model)


def build_mask(power: np.ndarray, mu: float, mask_mode: MaskMode = "mu") -> np.ndarray:
    """
    Serving mask: antenna m serves UT k iff power[m, k] >= mu * max_m power[m, k].

    Full mode is the classical baseline, every antenna serves every UT.
    A column with no received power stays all-False.

    Example:
        >>> build_mask(np.array([[4.0], [1.0]]), 0.5)[:, 0]
        array([ True, False])
    """
    if mask_mode == "full":
        return np.ones(power.shape, dtype=bool)
    if not 0.0 < mu <= 1.0:
        raise CapacityInputError(f"mu out of (0,1] (got {mu})")
    peak = power.max(axis=0, keepdims=True)
    return meets_acceptance(power, peak, mu) & (peak > 0)
