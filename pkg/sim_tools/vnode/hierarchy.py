# smmimo_sim/sim_tools/vnode/hierarchy.py
"""VN hierarchy (a forest), EPC role assignment and PGW placement."""

from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional

from core.exceptions import HierarchyCycle, PgwPlacementError, RoleConstraintViolated, UnknownResource
from core.logger import get_logger
from sim_tools.vnode.resources import EpcRole, VirtualNode, with_parent, with_roles

logger = get_logger("vnode.hierarchy")


class PgwMode(str, Enum):
    CENTRALIZED = "centralized"
    DISTRIBUTED = "distributed"


class VnHierarchy:
    """
    Parent links and EPC roles of a set of VNs.

    Every mutation keeps the parent relation acyclic.
    """

    def __init__(self):
        self._parent: Dict[int, Optional[int]] = {}
        self._roles: Dict[int, FrozenSet[EpcRole]] = {}

    def __contains__(self, vn_id: int) -> bool:
        return vn_id in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def vn_ids(self) -> List[int]:
        return sorted(self._parent)

    def add(self, vn_id: int, parent: Optional[int] = None) -> None:
        self._parent.setdefault(vn_id, None)
        self._roles.setdefault(vn_id, frozenset())
        self.set_parent(vn_id, parent)

    def set_parent(self, vn_id: int, parent: Optional[int]) -> None:
        """
        Raises:
            UnknownResource: If either VN is not in the hierarchy
            HierarchyCycle: If parent is vn_id or one of its descendants
        """
        if vn_id not in self._parent:
            raise UnknownResource(f"vn:{vn_id}")
        if parent is not None:
            if parent not in self._parent:
                raise UnknownResource(f"vn:{parent}")
            if parent == vn_id or vn_id in self.ancestors(parent):
                raise HierarchyCycle(vn_id, parent)
        self._parent[vn_id] = parent

    def parent(self, vn_id: int) -> Optional[int]:
        return self._parent[vn_id]

    def children(self, vn_id: int) -> List[int]:
        return sorted(v for v, p in self._parent.items() if p == vn_id)

    def roots(self) -> List[int]:
        return sorted(v for v, p in self._parent.items() if p is None)

    def leaves(self) -> List[int]:
        parents = set(self._parent.values())
        return sorted(v for v in self._parent if v not in parents)

    def is_root(self, vn_id: int) -> bool:
        return self._parent.get(vn_id, 0) is None

    def ancestors(self, vn_id: int) -> List[int]:
        """Ancestors of vn_id, nearest first."""
        chain = []
        current = self._parent[vn_id]
        while current is not None:
            chain.append(current)
            current = self._parent[current]
        return chain

    def depth(self, vn_id: int) -> int:
        return len(self.ancestors(vn_id))

    def lca(self, a: int, b: int) -> Optional[int]:
        """Lowest common ancestor (a VN counts as its own ancestor); None across trees."""
        seen = set([a] + self.ancestors(a))
        for candidate in [b] + self.ancestors(b):
            if candidate in seen:
                return candidate
        return None

    def roles(self, vn_id: int) -> FrozenSet[EpcRole]:
        return self._roles[vn_id]

    def set_roles(self, vn_id: int, roles: Iterable[EpcRole]) -> None:
        self._roles[vn_id] = frozenset(roles)

    def has_pgw(self, vn_id: int) -> bool:
        return EpcRole.PGW in self._roles[vn_id]

    def place_gateways(self, mode: PgwMode) -> None:
        """Centralized: PGW on roots only. Distributed: PGW on every VN."""
        for vn_id in self._parent:
            roles = set(self._roles[vn_id])
            if mode == PgwMode.DISTRIBUTED or self.is_root(vn_id):
                roles.add(EpcRole.PGW)
            else:
                roles.discard(EpcRole.PGW)
            self._roles[vn_id] = frozenset(roles)
        logger.debug(f"Gateways placed ({mode.value}) over {len(self)} VNs")

    def check_gateways(self, mode: PgwMode) -> None:
        """
        Raises:
            PgwPlacementError: Listing VNs whose PGW role contradicts mode
        """
        if mode == PgwMode.CENTRALIZED:
            offending = [v for v in self._parent if self.has_pgw(v) != self.is_root(v)]
        else:
            offending = [v for v in self._parent if not self.has_pgw(v)]
        if offending:
            raise PgwPlacementError(mode.value, offending)


def assign_roles(vn: VirtualNode, roles: Iterable[EpcRole], hierarchy: Optional[VnHierarchy] = None) -> VirtualNode:
    """
    Replace the role set of a VN.

    A VBS needs at least one antenna. A PGW must reach the internet
    edge, so the VN has to sit in the hierarchy as a root or under a
    parent.

    Raises:
        RoleConstraintViolated: Naming the violated constraint
    """
    roles = frozenset(roles)
    if EpcRole.VBS in roles and not vn.antenna_ids:
        raise RoleConstraintViolated(vn.vn_id, "VBS requires at least one antenna")
    if EpcRole.PGW in roles and (hierarchy is None or vn.vn_id not in hierarchy):
        raise RoleConstraintViolated(vn.vn_id, "PGW requires a root or parented VN in the hierarchy")

    if hierarchy is not None and vn.vn_id in hierarchy:
        hierarchy.set_roles(vn.vn_id, roles)
        vn = with_parent(vn, hierarchy.parent(vn.vn_id))
    return with_roles(vn, roles)
