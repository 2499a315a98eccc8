# smmimo_sim/sim_tools/capacity/model.py
"""
Instantaneous virtual-cell capacity.

C = log2 det(I + rho_eff * Hm^H Hm), rho_eff = rho / (1 + alpha * rho * k).
Interference from other cells is whitened into the noise term. The
log-determinant comes from a Cholesky factor of the smaller Gram matrix.
"""

import math
from typing import Optional

import numpy as np
from scipy import linalg

from core.exceptions import CapacityInputError, NumericalFailure


def effective_snr(rho_linear: float, alpha: float, k_interferers: float) -> float:
    return rho_linear / (1.0 + alpha * rho_linear * k_interferers)


def gram(Hm: np.ndarray) -> np.ndarray:
    """Hm^H Hm, or Hm Hm^H when that is smaller; both give the same log-det."""
    M, K = Hm.shape
    if M >= K:
        return Hm.conj().T @ Hm
    return Hm @ Hm.conj().T


def capacity_from_gram(G: np.ndarray, rho_eff: float) -> float:
    """
    log2 det(I + rho_eff * G) through a Cholesky factor.

    Raises:
        NumericalFailure: If the factorization fails (NaN/Inf input)
    """
    if rho_eff == 0.0:
        return 0.0
    A = np.eye(G.shape[0]) + rho_eff * G
    try:
        L = linalg.cholesky(A, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(str(exc)) from exc
    capacity = 2.0 * float(np.sum(np.log2(np.real(np.diag(L)))))
    return max(capacity, 0.0)


def _check_inputs(rho_linear: float, alpha: float, k_interferers: float) -> None:
    if not (math.isfinite(rho_linear) and rho_linear >= 0):
        raise CapacityInputError(f"rho must be finite and >= 0 (got {rho_linear})")
    if not 0.0 <= alpha <= 1.0:
        raise CapacityInputError(f"alpha out of [0,1] (got {alpha})")
    if not k_interferers >= 0:
        raise CapacityInputError(f"k_interferers must be >= 0 (got {k_interferers})")


def vc_capacity(
    H: np.ndarray,
    mask: Optional[np.ndarray],
    rho_linear: float,
    alpha: float,
    k_interferers: float,
) -> float:
    """
    Uplink capacity of one virtual cell in bps/Hz.

    Args:
        H: M x K complex channel
        mask: M x K boolean serving mask (None = full)
        rho_linear: Linear SNR
        alpha: Interference factor in [0, 1] (0 = isolated cell)
        k_interferers: Interfering users seen by the cell

    Returns:
        Capacity, never negative

    Example:
        >>> round(vc_capacity(np.array([[1.0 + 0j]]), None, 10.0, 0.0, 0), 6)  # log2(11)
        3.459432
    """
    _check_inputs(rho_linear, alpha, k_interferers)
    Hm = H if mask is None else H * mask
    return capacity_from_gram(gram(Hm), effective_snr(rho_linear, alpha, k_interferers))
