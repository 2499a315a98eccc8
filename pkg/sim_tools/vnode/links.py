# smmimo_sim/sim_tools/vnode/links.py
"""P2P backbone links and P2MP access links between VNs and UTs."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Optional

from core.exceptions import AntennaBusy, ForeignAntenna, ForeignUt, InvalidLinkEndpoints, UnknownResource
from core.logger import get_logger
from sim_tools.vnode.resources import VirtualNode

logger = get_logger("vnode.links")


class LinkKind(str, Enum):
    P2P = "P2P"
    P2MP = "P2MP"


@dataclass(frozen=True)
class VirtualLink:
    link_id: int
    kind: LinkKind
    vn_a: int
    antennas_a: FrozenSet[int]
    vn_b: Optional[int]
    antennas_b: FrozenSet[int]
    ut_ids: FrozenSet[int]
    capacity_units: int


class LinkRegistry:
    """Links in service and the antennas they keep busy."""

    def __init__(self):
        self.links: Dict[int, VirtualLink] = {}
        self.busy: Dict[int, int] = {}
        self._next_id = 0

    def register(self, link: VirtualLink) -> None:
        self.links[link.link_id] = link
        for antenna_id in link.antennas_a | link.antennas_b:
            self.busy[antenna_id] = link.link_id

    def next_id(self) -> int:
        link_id = self._next_id
        self._next_id += 1
        return link_id


def _owned(vn: VirtualNode, antennas: FrozenSet[int]) -> None:
    foreign = antennas - set(vn.antenna_ids)
    if foreign:
        raise ForeignAntenna(vn.vn_id, foreign)


def create_link(
    registry: LinkRegistry,
    vn_a: VirtualNode,
    antennas_a: Iterable[int],
    kind: LinkKind,
    *,
    vn_b: Optional[VirtualNode] = None,
    antennas_b: Iterable[int] = (),
    ut_ids: Iterable[int] = (),
    served_uts: Iterable[int] = (),
) -> VirtualLink:
    """
    Create a P2P (VN to VN) or P2MP (VN to UTs of its cell) link.

    capacity_units is min(|antennas_a|, |antennas_b| or |ut_ids|).

    Raises:
        InvalidLinkEndpoints: Malformed endpoints for the kind
        ForeignAntenna: Antennas not owned by the endpoint VN
        ForeignUt: P2MP UTs outside vn_a's virtual cell
        AntennaBusy: Antennas already serving another link
    """
    side_a = frozenset(antennas_a)
    side_b = frozenset(antennas_b)
    uts = frozenset(ut_ids)
    if not side_a:
        raise InvalidLinkEndpoints("endpoint a has no antennas")
    _owned(vn_a, side_a)

    if kind == LinkKind.P2P:
        if vn_b is None or vn_b.vn_id == vn_a.vn_id:
            raise InvalidLinkEndpoints("P2P needs two distinct VNs")
        if not side_b:
            raise InvalidLinkEndpoints("endpoint b has no antennas")
        _owned(vn_b, side_b)
        capacity = min(len(side_a), len(side_b))
    else:
        if not uts:
            raise InvalidLinkEndpoints("P2MP needs at least one UT")
        foreign = uts - frozenset(served_uts)
        if foreign:
            raise ForeignUt(vn_a.vn_id, foreign)
        capacity = min(len(side_a), len(uts))

    busy = [a for a in side_a | side_b if a in registry.busy]
    if busy:
        raise AntennaBusy(busy)

    link = VirtualLink(
        link_id=registry.next_id(),
        kind=kind,
        vn_a=vn_a.vn_id,
        antennas_a=side_a,
        vn_b=vn_b.vn_id if kind == LinkKind.P2P else None,
        antennas_b=side_b if kind == LinkKind.P2P else frozenset(),
        ut_ids=uts if kind == LinkKind.P2MP else frozenset(),
        capacity_units=capacity,
    )
    registry.register(link)
    logger.debug(f"{kind.value} link {link.link_id} up, capacity {capacity}", extra={"vn_id": vn_a.vn_id})
    return link


def release_link(registry: LinkRegistry, link_id: int) -> None:
    link = registry.links.pop(link_id, None)
    if link is None:
        raise UnknownResource(f"link:{link_id}")
    for antenna_id in link.antennas_a | link.antennas_b:
        registry.busy.pop(antenna_id, None)
