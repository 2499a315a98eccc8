# smmimo_sim/sim_tools/dbm/pilot.py
"""
Pilot broadcast, SQW and the mu acceptance rule.

SQW is the received power normalized by the strongest reception of the
same pilot. meets_acceptance is the one acceptance predicate; the
capacity mask uses it too.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import ConfigValidationError, EmptyServingSet, NoCoverage
from core.logger import get_logger
from core.rng import Stream, stream
from core.validators import check_half_open_unit
from sim_tools.topology.models import Scenario

logger = get_logger("dbm.pilot")

D_MIN_M = 1.0
D_REF_M = 1.0


def received_power(tx_power, distance, gamma: float):
    """tx_power * (max(d, d_min) / d_ref) ** -gamma, elementwise."""
    return tx_power * np.power(np.maximum(distance, D_MIN_M) / D_REF_M, -gamma)


def meets_acceptance(power, peak, mu: float):
    """
    True where an antenna qualifies as a serving candidate.

    Example:
        >>> meets_acceptance(np.array([4.0, 1.0]), 4.0, 0.5)
        array([ True, False])
    """
    return power >= mu * peak


def usable_mask(scenario: Scenario, antenna_ids: Optional[Iterable[int]] = None) -> Optional[np.ndarray]:
    """Boolean mask over antenna ids; None when every antenna is usable."""
    if antenna_ids is None:
        return None
    mask = np.zeros(scenario.antenna_count, dtype=bool)
    mask[np.fromiter(antenna_ids, dtype=np.int64)] = True
    return mask


def _require_mu(mu: float) -> None:
    issues: List[str] = []
    if not check_half_open_unit(issues, "mu", mu):
        raise ConfigValidationError(issues)


@dataclass(frozen=True)
class PilotReception:
    antenna_id: int
    ut_id: int
    delay_distance: float
    sqw: float


@dataclass(frozen=True)
class PilotSurvey:
    """Array view of one pilot: every antenna above the noise floor."""
    ut_id: int
    antenna_ids: np.ndarray
    delay_distances: np.ndarray
    powers: np.ndarray

    @property
    def covered(self) -> bool:
        return self.antenna_ids.size > 0

    def sqw(self) -> np.ndarray:
        return self.powers / self.powers.max()

    def order(self) -> np.ndarray:
        """Indices sorted by (descending sqw, ascending antenna id)."""
        return np.lexsort((self.antenna_ids, -self.powers))


def survey_pilot(
    scenario: Scenario,
    ut_id: int,
    *,
    position: Optional[Tuple[float, float]] = None,
    epoch: int = 0,
    usable: Optional[np.ndarray] = None,
) -> PilotSurvey:
    """
    Receive one UT pilot at every antenna.

    Args:
        scenario: Placed scenario
        ut_id: Broadcasting UT
        position: Override of the UT position (a moved UT)
        epoch: Access epoch; keys the range-noise stream
        usable: Boolean mask over antenna ids; masked-out antennas
            (failed POST) do not receive

    Returns:
        PilotSurvey restricted to usable antennas at or above the noise floor
    """
    config = scenario.config
    ut = scenario.uts[ut_id]
    xy = np.asarray(ut.position if position is None else position, dtype=np.float64)

    distances = np.hypot(*(scenario.antenna_positions - xy).T)
    powers = received_power(ut.tx_power, distances, config.pathloss_exponent)

    delays = distances
    if config.range_noise_sigma_m > 0:
        noise = stream(scenario.seed, Stream.RANGE_NOISE, ut_id, epoch).normal(
            0.0, config.range_noise_sigma_m, size=distances.size
        )
        delays = np.maximum(distances + noise, 0.0)

    heard = powers >= config.noise_floor
    if usable is not None:
        heard &= usable
    return PilotSurvey(
        ut_id=ut_id,
        antenna_ids=np.flatnonzero(heard),
        delay_distances=delays[heard],
        powers=powers[heard],
    )


def receptions_from_survey(survey: PilotSurvey) -> List[PilotReception]:
    if not survey.covered:
        return []
    sqw = survey.sqw()
    return [
        PilotReception(
            antenna_id=int(survey.antenna_ids[i]),
            ut_id=survey.ut_id,
            delay_distance=float(survey.delay_distances[i]),
            sqw=float(sqw[i]),
        )
        for i in survey.order()
    ]


def broadcast_pilot(
    scenario: Scenario,
    ut_id: int,
    *,
    position: Optional[Tuple[float, float]] = None,
    epoch: int = 0,
    usable: Optional[np.ndarray] = None,
) -> List[PilotReception]:
    """
    Step 1-2 of the access procedure: pilot broadcast and antenna reports.

    Returns:
        Receptions sorted by (descending sqw, ascending antenna id)

    Raises:
        NoCoverage: If no usable antenna hears the pilot above the noise floor
    """
    receptions = receptions_from_survey(survey_pilot(scenario, ut_id, position=position, epoch=epoch, usable=usable))
    if not receptions:
        raise NoCoverage(ut_id)
    return receptions


# ============================================================
# Candidate selection and serving decision
# ============================================================

@dataclass(frozen=True)
class CandidateSet:
    ut_id: int
    mu: float
    antenna_ids: Tuple[int, ...]
    sqws: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.antenna_ids)


def select_candidates(receptions: Sequence[PilotReception], mu: float, ut_id: Optional[int] = None) -> CandidateSet:
    """
    Step 3: antennas with sqw >= mu * max sqw.

    Raises:
        ConfigValidationError: If mu is outside (0, 1]
    """
    _require_mu(mu)
    if not receptions:
        return CandidateSet(ut_id=-1 if ut_id is None else ut_id, mu=mu, antenna_ids=(), sqws=())

    peak = max(r.sqw for r in receptions)
    chosen = sorted(
        (r for r in receptions if meets_acceptance(r.sqw, peak, mu)),
        key=lambda r: (-r.sqw, r.antenna_id),
    )
    return CandidateSet(
        ut_id=receptions[0].ut_id if ut_id is None else ut_id,
        mu=mu,
        antenna_ids=tuple(r.antenna_id for r in chosen),
        sqws=tuple(r.sqw for r in chosen),
    )


def decide_serving_set(candidates: CandidateSet, serve_quota: int = 0) -> Tuple[int, ...]:
    """
    Step 4: the parent VN keeps the best serve_quota candidates (0 = all).

    Raises:
        EmptyServingSet: If there are no candidates
    """
    if not candidates.antenna_ids:
        raise EmptyServingSet(candidates.ut_id)
    if serve_quota <= 0:
        return candidates.antenna_ids
    return candidates.antenna_ids[:serve_quota]


def serving_receptions(survey: PilotSurvey, mu: float, serve_quota: int = 0) -> List[PilotReception]:
    """
    Steps 3-4 on the array view: receptions of the serving antennas only.

    Same rule and order as select_candidates + decide_serving_set,
    without materializing a reception for every antenna.
    """
    _require_mu(mu)
    if not survey.covered:
        raise EmptyServingSet(survey.ut_id)
    order = survey.order()
    sqw = survey.sqw()[order]
    # sorted by descending sqw, so the accepted antennas form a prefix
    keep = int(np.count_nonzero(meets_acceptance(sqw, sqw.max(), mu)))
    if serve_quota > 0:
        keep = min(keep, serve_quota)
    return [
        PilotReception(
            antenna_id=int(survey.antenna_ids[i]),
            ut_id=survey.ut_id,
            delay_distance=float(survey.delay_distances[i]),
            sqw=float(s),
        )
        for i, s in zip(order[:keep], sqw[:keep])
    ]
