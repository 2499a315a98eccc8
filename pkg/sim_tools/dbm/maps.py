# smmimo_sim/sim_tools/dbm/maps.py
"""
Per-antenna Delay Based Maps and the learning loop.

Each antenna owns its map; updates are collected per epoch and applied
once per antenna, so there is never more than one writer.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import pandas as pd

from core.logger import get_logger
from sim_tools.dbm.pilot import PilotReception, serving_receptions, survey_pilot, usable_mask
from sim_tools.topology.models import Scenario

logger = get_logger("dbm.maps")

MAJOR_DISTANCE_M = 1.0
MAJOR_SQW = 0.01
DBM_COLUMNS = ["antenna_id", "ut_id", "delay_distance_m", "sqw", "epoch"]


class DbmEntry(NamedTuple):
    delay_distance: float
    sqw: float
    last_update_epoch: int


@dataclass
class DelayBasedMap:
    antenna_id: int
    entries: Dict[int, DbmEntry] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DbmUpdate:
    dbm: DelayBasedMap
    major_ut_ids: Tuple[int, ...]


def is_major(old: DbmEntry, delay_distance: float, sqw: float) -> bool:
    return abs(old.delay_distance - delay_distance) > MAJOR_DISTANCE_M or abs(old.sqw - sqw) > MAJOR_SQW


def update_dbm(dbm: DelayBasedMap, receptions: Iterable[PilotReception], epoch: int) -> DbmUpdate:
    """
    Step 5: upsert this antenna's receptions.

    Receptions of other antennas are ignored; entries of UTs not in the
    batch are kept. New entries count as major updates.
    """
    entries = dict(dbm.entries)
    major: List[int] = []
    for reception in receptions:
        if reception.antenna_id != dbm.antenna_id:
            continue
        old = entries.get(reception.ut_id)
        if old is None or is_major(old, reception.delay_distance, reception.sqw):
            major.append(reception.ut_id)
        entries[reception.ut_id] = DbmEntry(reception.delay_distance, reception.sqw, epoch)
    return DbmUpdate(DelayBasedMap(dbm.antenna_id, entries), tuple(sorted(set(major))))


@dataclass
class DbmLearning:
    dbms: Dict[int, DelayBasedMap]
    serving_sets: Dict[int, Tuple[int, ...]]
    uncovered: List[int]
    epochs: int
    major_per_epoch: List[int]

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (antenna_id, ut_id, entry.delay_distance, entry.sqw, entry.last_update_epoch)
            for antenna_id in sorted(self.dbms)
            for ut_id, entry in sorted(self.dbms[antenna_id].entries.items())
        ]
        return pd.DataFrame(rows, columns=DBM_COLUMNS)


def learn_dbms(scenario: Scenario, usable_antenna_ids: Optional[Iterable[int]] = None) -> DbmLearning:
    """
    Repeat the access procedure for every UT until the maps settle.

    Only granted (serving) antennas learn a UT. Learning stops after the
    first epoch with no major update, or after dbm_max_epochs.

    Args:
        scenario: Placed scenario
        usable_antenna_ids: Antennas that passed POST (default: all);
            the others neither hear pilots nor hold entries

    Returns:
        DbmLearning with the final maps and last serving sets
    """
    config = scenario.config
    usable = usable_mask(scenario, usable_antenna_ids)
    dbms: Dict[int, DelayBasedMap] = {}
    serving_sets: Dict[int, Tuple[int, ...]] = {}
    uncovered: List[int] = []
    major_per_epoch: List[int] = []

    epoch = 0
    for epoch in range(config.dbm_max_epochs):
        batches: Dict[int, List[PilotReception]] = defaultdict(list)
        uncovered = []
        for ut in scenario.uts:
            survey = survey_pilot(scenario, ut.id, epoch=epoch, usable=usable)
            if not survey.covered:
                uncovered.append(ut.id)
                continue
            granted = serving_receptions(survey, config.mu, config.serve_quota)
            serving_sets[ut.id] = tuple(r.antenna_id for r in granted)
            for reception in granted:
                batches[reception.antenna_id].append(reception)

        major = 0
        for antenna_id in sorted(batches):
            update = update_dbm(dbms.get(antenna_id, DelayBasedMap(antenna_id)), batches[antenna_id], epoch)
            dbms[antenna_id] = update.dbm
            major += len(update.major_ut_ids)
        major_per_epoch.append(major)
        logger.debug(f"DBM epoch {epoch}: {major} major updates", extra={"round": epoch})
        if major == 0:
            break

    if uncovered:
        logger.warning(f"{len(uncovered)} UT(s) without coverage")
    logger.info(
        f"DBM learning finished after {epoch + 1} epoch(s), {len(dbms)} antennas hold entries",
        extra={"seed": scenario.seed},
    )
    return DbmLearning(
        dbms=dbms,
        serving_sets={u: serving_sets[u] for u in sorted(serving_sets) if u not in uncovered},
        uncovered=uncovered,
        epochs=epoch + 1,
        major_per_epoch=major_per_epoch,
    )


def anchors_for_ut(scenario: Scenario, dbms: Dict[int, DelayBasedMap], ut_id: int) -> List[Tuple[Tuple[float, float], float]]:
    """(antenna position, delay distance) of every antenna holding ut_id, by antenna id."""
    return [
        (scenario.antennas[antenna_id].position, dbms[antenna_id].entries[ut_id].delay_distance)
        for antenna_id in sorted(dbms)
        if ut_id in dbms[antenna_id].entries
    ]
