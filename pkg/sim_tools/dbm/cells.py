# smmimo_sim/sim_tools/dbm/cells.py
"""Virtual cell formation and interference isolation."""

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, Sequence

import pandas as pd

from core.exceptions import EmptyServingSet
from core.logger import get_logger
from sim_tools.topology.models import Scenario

logger = get_logger("dbm.cells")

CELL_COLUMNS = ["vc_id", "ut_id", "antenna_id"]
ISOLATION_COLUMNS = ["vc_a", "vc_b", "shared_antennas", "cross_service"]


@dataclass(frozen=True)
class VirtualCell:
    vc_id: int
    vn_id: int
    antenna_ids: FrozenSet[int]
    ut_ids: FrozenSet[int]


def antenna_owners(scenario: Scenario, pn_to_vn: Mapping[int, int]) -> Dict[int, int]:
    """Antenna id -> owning VN id, for antennas of PNs that belong to a VN."""
    return {
        antenna.id: pn_to_vn[antenna.pn_id]
        for antenna in scenario.antennas
        if antenna.pn_id in pn_to_vn
    }


def form_virtual_cells(
    serving_sets: Mapping[int, Sequence[int]],
    antenna_owner: Mapping[int, int],
) -> List[VirtualCell]:
    """
    Group UTs into one virtual cell per VN.

    A UT joins the VN owning most of its serving antennas (ties go to the
    lowest vn_id). A cell's antennas are its UTs' serving antennas that
    the VN owns. VNs serving no UT get no cell.

    Raises:
        EmptyServingSet: If a UT has no serving antenna owned by any VN
    """
    uts_by_vn: Dict[int, set] = defaultdict(set)
    antennas_by_vn: Dict[int, set] = defaultdict(set)

    for ut_id in sorted(serving_sets):
        votes = Counter(antenna_owner[a] for a in serving_sets[ut_id] if a in antenna_owner)
        if not votes:
            raise EmptyServingSet(ut_id)
        vn_id = min(votes, key=lambda vn: (-votes[vn], vn))
        uts_by_vn[vn_id].add(ut_id)
        antennas_by_vn[vn_id].update(a for a in serving_sets[ut_id] if antenna_owner.get(a) == vn_id)

    return [
        VirtualCell(vc_id=vn_id, vn_id=vn_id, antenna_ids=frozenset(antennas_by_vn[vn_id]), ut_ids=frozenset(uts))
        for vn_id, uts in sorted(uts_by_vn.items())
    ]


@dataclass(frozen=True)
class IsolationReport:
    pairs: pd.DataFrame
    outside_slots: int
    total_slots: int

    @property
    def leakage(self) -> float:
        """lambda: share of serving slots on antennas outside the UT's own cell."""
        return self.outside_slots / self.total_slots if self.total_slots else 0.0


def check_isolation(cells: Sequence[VirtualCell], serving_sets: Mapping[int, Sequence[int]]) -> IsolationReport:
    """
    Measure how well DBM-formed cells isolate interference.

    Per cell pair: antennas in both cells, and serving slots one cell's
    UTs hold on the other cell's antennas (both directions).
    """
    cell_of_ut = {ut: cell.vc_id for cell in cells for ut in cell.ut_ids}
    antennas_of = {cell.vc_id: cell.antenna_ids for cell in cells}

    outside = 0
    total = 0
    cross: Counter = Counter()
    for ut_id in sorted(serving_sets):
        if ut_id not in cell_of_ut:
            continue
        own = cell_of_ut[ut_id]
        for antenna_id in serving_sets[ut_id]:
            total += 1
            if antenna_id in antennas_of[own]:
                continue
            outside += 1
            for other, antennas in antennas_of.items():
                if other != own and antenna_id in antennas:
                    cross[tuple(sorted((own, other)))] += 1

    rows = [
        (a.vc_id, b.vc_id, len(a.antenna_ids & b.antenna_ids), cross[(a.vc_id, b.vc_id)])
        for a, b in combinations(sorted(cells, key=lambda c: c.vc_id), 2)
    ]
    report = IsolationReport(pd.DataFrame(rows, columns=ISOLATION_COLUMNS), outside, total)
    logger.info(f"Isolation: leakage {report.leakage:.6f} over {total} serving slots")
    return report


def cells_to_frame(cells: Sequence[VirtualCell], serving_sets: Mapping[int, Sequence[int]]) -> pd.DataFrame:
    """vc_id,ut_id,antenna_id rows: each UT's serving antennas inside its cell."""
    rows = [
        (cell.vc_id, ut_id, antenna_id)
        for cell in sorted(cells, key=lambda c: c.vc_id)
        for ut_id in sorted(cell.ut_ids)
        for antenna_id in sorted(serving_sets[ut_id])
        if antenna_id in cell.antenna_ids
    ]
    return pd.DataFrame(rows, columns=CELL_COLUMNS)
