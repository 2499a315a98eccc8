# smmimo_sim/sim_tools/vnode/resources.py
"""
Pooled PN resources, virtual nodes and the VMU mapping.

The pool is the single owner of allocation state. Allocation is greedy
in ascending (pn_id, block_id, index) order and all-or-nothing.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Set, Tuple

from core.exceptions import InsufficientResources, UnknownResource
from core.logger import get_logger
from sim_tools.bootstrap.stages import PostReport
from sim_tools.topology.models import Scenario

logger = get_logger("vnode.resources")


class ResourceClass(str, Enum):
    ANTENNA = "antenna"
    COMPUTE = "compute"
    STORAGE = "storage"


class EpcRole(str, Enum):
    VBS = "VBS"
    VMSC = "VMSC"
    PGW = "PGW"
    SGW = "SGW"
    MME = "MME"
    HSS_CACHE = "HSS_CACHE"


class PhysicalResource(NamedTuple):
    """
    One physical unit. For antennas index is the global antenna id;
    for compute and storage it is the unit ordinal within the block.
    """
    pn_id: int
    resource_class: ResourceClass
    block_id: int
    index: int


class VirtualResource(NamedTuple):
    vn_id: int
    resource_class: ResourceClass
    ordinal: int


@dataclass(frozen=True)
class VnMember:
    pn_id: int
    block_ids: Tuple[int, ...]
    antenna_ids: Tuple[int, ...]


@dataclass(frozen=True)
class VirtualNode:
    vn_id: int
    members: Tuple[VnMember, ...]
    resources: Tuple[PhysicalResource, ...]
    roles: FrozenSet[EpcRole] = frozenset()
    parent_vn: Optional[int] = None

    @property
    def antenna_ids(self) -> Tuple[int, ...]:
        return tuple(a for m in self.members for a in m.antenna_ids)

    @property
    def pn_ids(self) -> Tuple[int, ...]:
        return tuple(m.pn_id for m in self.members)

    def count(self, resource_class: ResourceClass) -> int:
        return sum(1 for r in self.resources if r.resource_class == resource_class)


class VmuMapping:
    """Bijection between virtual resource ids and physical resources."""

    def __init__(self):
        self._forward: Dict[VirtualResource, PhysicalResource] = {}
        self._backward: Dict[PhysicalResource, VirtualResource] = {}

    def bind(self, virtual: VirtualResource, physical: PhysicalResource) -> None:
        if virtual in self._forward or physical in self._backward:
            raise ValueError(f"VMU entry already bound: {virtual} / {physical}")
        self._forward[virtual] = physical
        self._backward[physical] = virtual

    def unbind_vn(self, vn_id: int) -> List[PhysicalResource]:
        released = [v for v in self._forward if v.vn_id == vn_id]
        physical = [self._forward.pop(v) for v in released]
        for p in physical:
            del self._backward[p]
        return physical

    def forward(self, virtual: VirtualResource) -> PhysicalResource:
        try:
            return self._forward[virtual]
        except KeyError:
            raise UnknownResource(virtual) from None

    def backward(self, physical: PhysicalResource) -> VirtualResource:
        try:
            return self._backward[physical]
        except KeyError:
            raise UnknownResource(physical) from None

    def virtual_ids(self, vn_id: Optional[int] = None) -> List[VirtualResource]:
        return sorted(v for v in self._forward if vn_id is None or v.vn_id == vn_id)

    def is_bijective(self) -> bool:
        return len(self._forward) == len(self._backward) and all(
            self._backward[p] == v for v, p in self._forward.items()
        )

    def __len__(self) -> int:
        return len(self._forward)


class ResourcePool:
    """
    Free/allocated accounting per resource class.

    Failed CCM blocks (from POST reports) contribute no resources.
    """

    def __init__(self, resources: Iterable[PhysicalResource]):
        self._all: List[PhysicalResource] = sorted(set(resources), key=_order)
        self._free: Set[PhysicalResource] = set(self._all)
        self.vmu = VmuMapping()
        self.nodes: Dict[int, VirtualNode] = {}
        self._next_vn = 0

    @classmethod
    def from_scenario(cls, scenario: Scenario, post_reports: Optional[Mapping[int, PostReport]] = None) -> "ResourcePool":
        resources: List[PhysicalResource] = []
        for pn in scenario.pns:
            report = post_reports.get(pn.id) if post_reports is not None else None
            if post_reports is not None and report is None:
                continue
            for block in (report.blocks if report is not None else pn.blocks):
                if not block.post_passed:
                    continue
                resources.extend(PhysicalResource(pn.id, ResourceClass.ANTENNA, block.id, a) for a in block.antenna_ids)
                resources.extend(PhysicalResource(pn.id, ResourceClass.COMPUTE, block.id, u) for u in range(block.compute_units))
                resources.extend(PhysicalResource(pn.id, ResourceClass.STORAGE, block.id, u) for u in range(block.storage_units))
        return cls(resources)

    def total(self, resource_class: ResourceClass) -> int:
        return sum(1 for r in self._all if r.resource_class == resource_class)

    def free(self, resource_class: ResourceClass, pn_id: Optional[int] = None) -> List[PhysicalResource]:
        return sorted(
            (r for r in self._free if r.resource_class == resource_class and (pn_id is None or r.pn_id == pn_id)),
            key=_order,
        )

    def allocated(self, resource_class: ResourceClass) -> int:
        return self.total(resource_class) - len(self.free(resource_class))

    def take(self, request: Mapping[ResourceClass, int], pn_ids: Optional[Iterable[int]] = None) -> List[PhysicalResource]:
        """
        Debit the pool; nothing is taken if any class falls short.

        Raises:
            InsufficientResources: Names the first short resource class
        """
        allowed = None if pn_ids is None else set(pn_ids)
        chosen: List[PhysicalResource] = []
        for resource_class in ResourceClass:
            wanted = int(request.get(resource_class, 0))
            if wanted <= 0:
                continue
            candidates = [r for r in self.free(resource_class) if allowed is None or r.pn_id in allowed]
            if len(candidates) < wanted:
                raise InsufficientResources(resource_class.value, wanted, len(candidates))
            chosen.extend(candidates[:wanted])
        self._free.difference_update(chosen)
        return chosen

    def give_back(self, resources: Iterable[PhysicalResource]) -> None:
        self._free.update(resources)

    def new_vn_id(self) -> int:
        vn_id = self._next_vn
        self._next_vn += 1
        return vn_id


def _order(resource: PhysicalResource) -> Tuple[int, int, int, int]:
    return (resource.pn_id, list(ResourceClass).index(resource.resource_class), resource.block_id, resource.index)


# ============================================================
# Virtual node lifecycle
# ============================================================

def _members(resources: Iterable[PhysicalResource]) -> Tuple[VnMember, ...]:
    blocks: Dict[int, Set[int]] = {}
    antennas: Dict[int, List[int]] = {}
    for r in resources:
        blocks.setdefault(r.pn_id, set()).add(r.block_id)
        if r.resource_class == ResourceClass.ANTENNA:
            antennas.setdefault(r.pn_id, []).append(r.index)
    return tuple(
        VnMember(pn_id, tuple(sorted(blocks[pn_id])), tuple(sorted(antennas.get(pn_id, []))))
        for pn_id in sorted(blocks)
    )


def form_virtual_node(
    pool: ResourcePool,
    request: Mapping[ResourceClass, int],
    pn_ids: Optional[Iterable[int]] = None,
) -> Tuple[VirtualNode, VmuMapping]:
    """
    Allocate a VN from the pool and bind its virtual resource ids.

    Args:
        pool: Resource pool (debited on success only)
        request: Units wanted per resource class
        pn_ids: Restrict allocation to these PNs

    Returns:
        (VirtualNode, the pool's VMU mapping)

    Raises:
        InsufficientResources: If any class cannot be satisfied

    Example:
        >>> vn, vmu = form_virtual_node(pool, {ResourceClass.ANTENNA: 300})
        >>> [m.pn_id for m in vn.members]
        [0, 1]
    """
    resources = pool.take(request, pn_ids)
    if not resources:
        raise InsufficientResources("any", 0, 0, reason="empty request")
    vn_id = pool.new_vn_id()
    ordinals: Dict[ResourceClass, int] = {}
    for physical in resources:
        ordinal = ordinals.get(physical.resource_class, 0)
        ordinals[physical.resource_class] = ordinal + 1
        pool.vmu.bind(VirtualResource(vn_id, physical.resource_class, ordinal), physical)

    vn = VirtualNode(vn_id=vn_id, members=_members(resources), resources=tuple(resources))
    pool.nodes[vn_id] = vn
    logger.info(
        f"VN formed from PNs {list(vn.pn_ids)}: "
        + ", ".join(f"{c.value}={n}" for c, n in ordinals.items()),
        extra={"vn_id": vn_id},
    )
    return vn, pool.vmu


def map_virtual_to_physical(vmu: VmuMapping, virtual_id: VirtualResource) -> PhysicalResource:
    """Raises UnknownResource for unmapped (or released) ids."""
    return vmu.forward(virtual_id)


def map_physical_to_virtual(vmu: VmuMapping, physical_id: PhysicalResource) -> VirtualResource:
    return vmu.backward(physical_id)


def release_virtual_node(pool: ResourcePool, vn_id: int) -> None:
    """Return a VN's resources to the pool; its virtual ids become unknown."""
    if vn_id not in pool.nodes:
        raise UnknownResource(f"vn:{vn_id}")
    pool.give_back(pool.vmu.unbind_vn(vn_id))
    del pool.nodes[vn_id]
    logger.info("VN released", extra={"vn_id": vn_id})


def form_per_pn_nodes(pool: ResourcePool, scenario: Scenario) -> List[VirtualNode]:
    """One VN per PN holding all of its free resources."""
    nodes = []
    for pn in scenario.pns:
        request = {c: len(pool.free(c, pn.id)) for c in ResourceClass}
        if not any(request.values()):
            continue
        vn, _ = form_virtual_node(pool, request, pn_ids=[pn.id])
        nodes.append(vn)
    return nodes


def with_roles(vn: VirtualNode, roles: Iterable[EpcRole]) -> VirtualNode:
    return replace(vn, roles=frozenset(roles))


def with_parent(vn: VirtualNode, parent_vn: Optional[int]) -> VirtualNode:
    return replace(vn, parent_vn=parent_vn)
