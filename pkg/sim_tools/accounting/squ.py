# smmimo_sim/sim_tools/accounting/squ.py
"""
Service Quanta Unit (SQU) pricing.

An SQU cost is the weighted sum of five service metrics: data urgency,
energy, distance to destination (hops), signaling and content quality.
"""

from dataclasses import astuple, dataclass, fields
from typing import List, Optional

import numpy as np
import pandas as pd

from core.config import settings
from core.exceptions import InvalidSquInput, UnroutedFlow
from core.logger import get_logger
from core.validators import check_closed_unit, check_min
from sim_tools.vnode.traffic import TrafficFlow, TrafficReport

logger = get_logger("accounting.squ")

SQU_FIELDS = ["data_urgency", "energy_cost", "distance_to_destination", "signaling_cost", "content_quality"]
SQU_COLUMNS = ["flow_id", "cost_squ"]


@dataclass(frozen=True)
class SquVector:
    data_urgency: float = 0.0
    energy_cost: float = 0.0
    distance_to_destination: float = 0.0
    signaling_cost: float = 0.0
    content_quality: float = 0.0

    def __post_init__(self):
        issues: List[str] = []
        check_closed_unit(issues, "data_urgency", self.data_urgency)
        check_min(issues, "energy_cost", self.energy_cost, 0.0)
        check_min(issues, "distance_to_destination", self.distance_to_destination, 0.0)
        check_min(issues, "signaling_cost", self.signaling_cost, 0.0)
        check_closed_unit(issues, "content_quality", self.content_quality)
        if issues:
            raise InvalidSquInput(issues)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class SquWeights:
    data_urgency: float = 1.0
    energy_cost: float = 1.0
    distance_to_destination: float = 1.0
    signaling_cost: float = 1.0
    content_quality: float = 1.0

    def __post_init__(self):
        issues: List[str] = []
        for f in fields(self):
            check_min(issues, f"weight {f.name}", getattr(self, f.name), 0.0)
        if not issues and not any(getattr(self, f.name) > 0 for f in fields(self)):
            issues.append("at least one weight must be > 0")
        if issues:
            raise InvalidSquInput(issues)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


def compute_squ(vector: SquVector, weights: SquWeights) -> float:
    """
    Weighted sum of the metric vector.

    Example:
        >>> compute_squ(SquVector(0.5, 2, 3, 1, 0.5), SquWeights())
        7.0
    """
    return float(np.dot(vector.as_array(), weights.as_array()))


def flow_vector(
    flow: TrafficFlow,
    report: TrafficReport,
    setup_signaling: Optional[float] = None,
    energy_per_hop: Optional[float] = None,
) -> SquVector:
    """
    Metric vector of a routed flow.

    Raises:
        UnroutedFlow: If the report has no route for the flow
    """
    if flow.flow_id not in report.hops:
        raise UnroutedFlow(flow.flow_id)
    hops = report.hops[flow.flow_id]
    setup = settings.SQU_SETUP_SIGNALING if setup_signaling is None else setup_signaling
    per_hop = settings.SQU_ENERGY_PER_HOP if energy_per_hop is None else energy_per_hop
    return SquVector(
        data_urgency=flow.urgency,
        energy_cost=per_hop * hops * flow.volume,
        distance_to_destination=float(hops),
        signaling_cost=setup,
        content_quality=flow.content_quality,
    )


def price_flow(
    flow: TrafficFlow,
    report: TrafficReport,
    weights: SquWeights,
    setup_signaling: Optional[float] = None,
    energy_per_hop: Optional[float] = None,
) -> float:
    """SQU cost of one routed flow; hop count comes from route_traffic."""
    return compute_squ(flow_vector(flow, report, setup_signaling, energy_per_hop), weights)


def price_vectors(frame: pd.DataFrame, weights: SquWeights) -> pd.DataFrame:
    """
    Price CSV rows of flow_id plus the five metric columns.

    Raises:
        InvalidSquInput: Missing columns, or a row out of range (row named)
    """
    missing = [c for c in ["flow_id"] + SQU_FIELDS if c not in frame.columns]
    if missing:
        raise InvalidSquInput([f"missing column {c}" for c in missing])

    costs = []
    for row in frame.itertuples(index=False):
        try:
            vector = SquVector(*(float(getattr(row, name)) for name in SQU_FIELDS))
        except InvalidSquInput as exc:
            raise InvalidSquInput(exc.details["issues"], flow_id=str(row.flow_id)) from exc
        costs.append(compute_squ(vector, weights))

    logger.info(f"Priced {len(costs)} SQU vectors")
    return pd.DataFrame({"flow_id": frame["flow_id"].tolist(), "cost_squ": costs}, columns=SQU_COLUMNS)
