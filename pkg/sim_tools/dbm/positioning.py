# smmimo_sim/sim_tools/dbm/positioning.py
"""
UT positioning by multilateration over DBM delay distances.

A linearized least-squares solve gives the starting point; a damped
Gauss-Newton (Levenberg-Marquardt) refinement on the range residuals
finishes it.
"""

from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from core.exceptions import DegenerateGeometry, InsufficientAnchors
from core.logger import get_logger
from sim_tools.dbm.maps import DelayBasedMap, anchors_for_ut
from sim_tools.topology.models import Scenario

logger = get_logger("dbm.positioning")

Anchor = Tuple[Tuple[float, float], float]

COLLINEAR_RATIO = 1e-9
MAX_REFINE_STEPS = 50
REFINE_TOL = 1e-12


def _check_geometry(points: np.ndarray) -> None:
    singular = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    if singular[0] == 0.0 or singular[-1] < COLLINEAR_RATIO * singular[0]:
        raise DegenerateGeometry(singular)


def _linearized(points: np.ndarray, ranges: np.ndarray) -> np.ndarray:
    # subtract the first range equation from the others
    a = 2.0 * (points[1:] - points[0])
    b = (
        np.sum(points[1:] ** 2, axis=1) - np.sum(points[0] ** 2)
        - ranges[1:] ** 2 + ranges[0] ** 2
    )
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    return solution


def locate_ut(anchors: Sequence[Anchor]) -> np.ndarray:
    """
    Estimate a 2D position from (anchor position, distance) pairs.

    Args:
        anchors: At least three anchors, not all collinear

    Returns:
        Estimated position as a length-2 array

    Raises:
        InsufficientAnchors: Fewer than 3 anchors
        DegenerateGeometry: Anchors are collinear or coincident

    Example:
        >>> locate_ut([((0, 0), 5.0), ((10, 0), 53 ** 0.5), ((0, 10), 45 ** 0.5)]).round(6)
        array([3., 4.])
    """
    if len(anchors) < 3:
        raise InsufficientAnchors(len(anchors))
    points = np.array([a[0] for a in anchors], dtype=np.float64)
    ranges = np.array([a[1] for a in anchors], dtype=np.float64)
    _check_geometry(points)

    start = _linearized(points, ranges)

    def residuals(x: np.ndarray) -> np.ndarray:
        return np.hypot(*(x - points).T) - ranges

    def jacobian(x: np.ndarray) -> np.ndarray:
        delta = x - points
        norm = np.hypot(*delta.T)[:, None]
        # at an anchor the range gradient is undefined; that row carries no direction
        return np.divide(delta, norm, out=np.zeros_like(delta), where=norm > 0)

    start_cost = float(np.sum(residuals(start) ** 2))
    if start_cost == 0.0:
        return start

    result = least_squares(
        residuals, start, jac=jacobian, method="lm",
        xtol=REFINE_TOL, ftol=REFINE_TOL, gtol=REFINE_TOL, max_nfev=MAX_REFINE_STEPS,
    )
    if not np.all(np.isfinite(result.x)) or 2.0 * result.cost > start_cost:
        return start
    return result.x


def locate_from_dbm(scenario: Scenario, dbms: Dict[int, DelayBasedMap], ut_id: int) -> np.ndarray:
    """Position a UT from the delay distances of every antenna that holds it."""
    anchors = anchors_for_ut(scenario, dbms, ut_id)
    position = locate_ut(anchors)
    logger.debug(f"Located from {len(anchors)} anchors", extra={"ut_id": ut_id})
    return position
