# smmimo_sim/sim_tools/vnode/traffic.py
"""
Traffic routing over the VN hierarchy and the multi-PGW offload experiment.

Internet flows leave at the nearest VN (self first) holding a PGW;
internal flows climb to the lowest common ancestor and back down.
Backbone volume is volume times hops, summed over flows.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from core.exceptions import NoRoute
from core.logger import get_logger
from core.rng import Stream, stream
from sim_tools.vnode.hierarchy import PgwMode, VnHierarchy, assign_roles
from sim_tools.vnode.resources import EpcRole, ResourceClass, ResourcePool, VirtualNode, form_virtual_node, with_parent

logger = get_logger("vnode.traffic")

OFFLOAD_COLUMNS = ["mode", "total_volume", "backbone_volume", "edge_volume", "reduction_pct"]


class DestinationKind(str, Enum):
    INTERNET = "Internet"
    INTERNAL = "Internal"


@dataclass(frozen=True)
class TrafficFlow:
    flow_id: int
    src_ut: int
    volume: float
    dst_kind: DestinationKind = DestinationKind.INTERNET
    dst_vn: Optional[int] = None
    urgency: float = 0.0
    content_quality: float = 1.0

    def __post_init__(self):
        if not self.volume >= 0:
            raise ValueError(f"flow {self.flow_id}: volume must be >= 0 (got {self.volume})")
        if self.dst_kind == DestinationKind.INTERNAL and self.dst_vn is None:
            raise ValueError(f"flow {self.flow_id}: internal flow without dst_vn")


@dataclass
class TrafficReport:
    mode: PgwMode
    total_volume: float = 0.0
    backbone_volume: float = 0.0
    internet_volume: float = 0.0
    internet_backbone_volume: float = 0.0
    edge_volume: float = 0.0
    hops: Dict[int, int] = field(default_factory=dict)
    link_volumes: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def carry(self, path: Sequence[int], volume: float) -> None:
        for a, b in zip(path, path[1:]):
            key = (min(a, b), max(a, b))
            self.link_volumes[key] = self.link_volumes.get(key, 0.0) + volume


def route_traffic(
    flows: Sequence[TrafficFlow],
    hierarchy: VnHierarchy,
    pgw_mode: PgwMode,
    ut_home: Mapping[int, int],
) -> TrafficReport:
    """
    Route every flow and account backbone versus edge volume.

    Args:
        flows: Flows to route
        hierarchy: VN forest with PGW roles placed
        pgw_mode: Gateway mode the roles must match
        ut_home: UT id -> VN id serving it

    Returns:
        TrafficReport with per-flow hop counts and per-link volumes

    Raises:
        PgwPlacementError: If PGW roles contradict pgw_mode
        NoRoute: If a flow's source or destination is unreachable
    """
    hierarchy.check_gateways(pgw_mode)
    report = TrafficReport(mode=pgw_mode)

    for flow in flows:
        src = ut_home.get(flow.src_ut)
        if src is None or src not in hierarchy:
            raise NoRoute(flow.flow_id, f"UT {flow.src_ut} has no home VN")

        if flow.dst_kind == DestinationKind.INTERNET:
            path = [src]
            while not hierarchy.has_pgw(path[-1]):
                parent = hierarchy.parent(path[-1])
                if parent is None:
                    raise NoRoute(flow.flow_id, "no PGW on the path to the root")
                path.append(parent)
        else:
            if flow.dst_vn not in hierarchy:
                raise NoRoute(flow.flow_id, f"VN {flow.dst_vn} is not in the hierarchy")
            top = hierarchy.lca(src, flow.dst_vn)
            if top is None:
                raise NoRoute(flow.flow_id, f"VN {flow.dst_vn} is in another tree")
            up = [src] + hierarchy.ancestors(src)
            down = [flow.dst_vn] + hierarchy.ancestors(flow.dst_vn)
            path = up[:up.index(top) + 1] + list(reversed(down[:down.index(top)]))

        hops = len(path) - 1
        report.hops[flow.flow_id] = hops
        report.total_volume += flow.volume
        report.backbone_volume += flow.volume * hops
        if hops == 0:
            report.edge_volume += flow.volume
        if flow.dst_kind == DestinationKind.INTERNET:
            report.internet_volume += flow.volume
            report.internet_backbone_volume += flow.volume * hops
        report.carry(path, flow.volume)

    logger.info(
        f"Routed {len(flows)} flows ({pgw_mode.value}): backbone {report.backbone_volume:g}, "
        f"edge {report.edge_volume:g}"
    )
    return report


# ============================================================
# Offload experiment
# ============================================================

@dataclass
class OffloadTree:
    hierarchy: VnHierarchy
    nodes: Dict[int, VirtualNode]
    leaves: List[int]


def build_offload_tree(pool: ResourcePool, depth: int, fanout: int = 2) -> OffloadTree:
    """
    A complete tree of VNs, depth uplink hops from any leaf to the root.

    Each VN takes one antenna and one compute unit from the pool; leaves
    act as virtual base stations.
    """
    if depth < 0 or fanout < 1:
        raise ValueError(f"depth must be >= 0 and fanout >= 1 (got {depth}, {fanout})")
    hierarchy = VnHierarchy()
    nodes: Dict[int, VirtualNode] = {}
    request = {ResourceClass.ANTENNA: 1, ResourceClass.COMPUTE: 1}

    level: List[Optional[int]] = [None]
    for _ in range(depth + 1):
        next_level = []
        for parent in level:
            for _ in range(1 if parent is None else fanout):
                vn, _ = form_virtual_node(pool, request)
                hierarchy.add(vn.vn_id, parent)
                nodes[vn.vn_id] = with_parent(vn, parent)
                next_level.append(vn.vn_id)
        level = next_level

    for leaf in level:
        nodes[leaf] = assign_roles(nodes[leaf], {EpcRole.VBS}, hierarchy)
    return OffloadTree(hierarchy=hierarchy, nodes=nodes, leaves=list(level))


def internet_flow_count(n_flows: int, internet_fraction: float) -> int:
    """round(f * N), halves rounded up."""
    return int(math.floor(internet_fraction * n_flows + 0.5))


def generate_flows(
    n_flows: int,
    internet_fraction: float,
    leaves: Sequence[int],
    seed: int,
) -> Tuple[List[TrafficFlow], Dict[int, int]]:
    """
    Unit-volume flows from UTs homed round-robin on the leaves.

    Exactly round(f * N) flows go to the Internet; the rest go to a
    seeded leaf VN. Urgency and content quality are seeded in [0, 1].

    Returns:
        (flows, ut_home)
    """
    if not leaves:
        raise ValueError("at least one leaf VN is required")
    rng = stream(seed, Stream.TRAFFIC)
    internet = set(rng.permutation(n_flows)[:internet_flow_count(n_flows, internet_fraction)].tolist())
    targets = rng.integers(0, len(leaves), size=n_flows)
    urgency = rng.uniform(size=n_flows)
    quality = rng.uniform(size=n_flows)

    ut_home = {i: leaves[i % len(leaves)] for i in range(n_flows)}
    flows = [
        TrafficFlow(
            flow_id=i,
            src_ut=i,
            volume=1.0,
            dst_kind=DestinationKind.INTERNET if i in internet else DestinationKind.INTERNAL,
            dst_vn=None if i in internet else leaves[int(targets[i])],
            urgency=float(urgency[i]),
            content_quality=float(quality[i]),
        )
        for i in range(n_flows)
    ]
    return flows, ut_home


def offload_rows(reports: Sequence[TrafficReport], baseline: float) -> List[dict]:
    """
    CSV rows for the PGW comparison.

    reduction_pct is the backbone reduction versus baseline, the
    centralized backbone volume of the same flows (0 when baseline is 0).
    """
    rows = []
    for report in reports:
        if baseline:
            reduction = 100.0 * (1.0 - report.backbone_volume / baseline)
        else:
            reduction = 0.0
        rows.append({
            "mode": report.mode.value,
            "total_volume": report.total_volume,
            "backbone_volume": report.backbone_volume,
            "edge_volume": report.edge_volume,
            "reduction_pct": reduction,
        })
    return rows
