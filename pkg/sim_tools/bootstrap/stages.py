# smmimo_sim/sim_tools/bootstrap/stages.py
"""
PN boot stages and POST.

A PN walks PowerOn -> PostDone -> NosBooted -> BasicLinked ->
VirtualReady, one step per matching event. Anything else leaves the
state untouched and is recorded as a rejection.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Tuple, Union

from core.exceptions import AllBlocksFailed, InvalidFaultSet
from core.logger import get_logger
from sim_tools.topology.models import CcmBlock, PhysicalNode

if TYPE_CHECKING:
    from sim_tools.bootstrap.messages import ControlMessage

logger = get_logger("bootstrap.stages")


class BootStage(str, Enum):
    POWER_ON = "PowerOn"
    POST_DONE = "PostDone"
    NOS_BOOTED = "NosBooted"
    BASIC_LINKED = "BasicLinked"
    VIRTUAL_READY = "VirtualReady"


STAGE_ORDER = [
    BootStage.POWER_ON,
    BootStage.POST_DONE,
    BootStage.NOS_BOOTED,
    BootStage.BASIC_LINKED,
    BootStage.VIRTUAL_READY,
]


class BootEvent(str, Enum):
    POST_COMPLETE = "PostComplete"
    NOS_BOOT = "NosBoot"
    LINKS_ESTABLISHED = "LinksEstablished"
    VIRTUAL_MGMT_READY = "VirtualMgmtReady"


# event -> (stage it applies to, stage it leads to)
TRANSITIONS: Dict[BootEvent, Tuple[BootStage, BootStage]] = {
    BootEvent.POST_COMPLETE: (BootStage.POWER_ON, BootStage.POST_DONE),
    BootEvent.NOS_BOOT: (BootStage.POST_DONE, BootStage.NOS_BOOTED),
    BootEvent.LINKS_ESTABLISHED: (BootStage.NOS_BOOTED, BootStage.BASIC_LINKED),
    BootEvent.VIRTUAL_MGMT_READY: (BootStage.BASIC_LINKED, BootStage.VIRTUAL_READY),
}


@dataclass(frozen=True)
class StageRejection:
    sim_time: int
    stage: BootStage
    event: str


@dataclass(frozen=True)
class PnState:
    pn_id: int
    stage: BootStage = BootStage.POWER_ON
    history: Tuple[BootStage, ...] = (BootStage.POWER_ON,)
    rejections: Tuple[StageRejection, ...] = ()

    def at_least(self, stage: BootStage) -> bool:
        return STAGE_ORDER.index(self.stage) >= STAGE_ORDER.index(stage)


def _reject(state: PnState, sim_time: int, event: str) -> PnState:
    logger.debug(f"Rejected {event} at {state.stage.value}", extra={"pn_id": state.pn_id})
    return replace(state, rejections=state.rejections + (StageRejection(sim_time, state.stage, event),))


def advance_stage(state: PnState, event: Union[BootEvent, "ControlMessage"], sim_time: int = 0) -> PnState:
    """
    Apply one boot event or the receipt of one control message.

    Args:
        state: Current PN state
        event: BootEvent, or a ControlMessage delivered to this PN
        sim_time: Logical time of the event

    Returns:
        Advanced state, or the same stage with a rejection appended

    Example:
        >>> s = advance_stage(PnState(0), BootEvent.POST_COMPLETE)
        >>> s.stage.value
        'PostDone'
        >>> advance_stage(s, BootEvent.LINKS_ESTABLISHED).rejections[0].event
        'LinksEstablished'
    """
    if isinstance(event, BootEvent):
        source, target = TRANSITIONS[event]
        if state.stage != source:
            return _reject(state, sim_time, event.value)
        return replace(state, stage=target, history=state.history + (target,))

    # message receipt never changes the stage; Class2 needs BasicLinked
    if event.msg_class.value == "Class2" and not state.at_least(BootStage.BASIC_LINKED):
        return _reject(state, sim_time, f"{event.kind.value}:{event.msg_class.value}")
    return state


# ============================================================
# POST
# ============================================================

@dataclass(frozen=True)
class PostReport:
    """POST outcome of one PN: its blocks with post_passed set by the test."""
    pn_id: int
    blocks: Tuple[CcmBlock, ...]
    master_block_id: int

    @property
    def block_passed(self) -> Dict[int, bool]:
        return {block.id: block.post_passed for block in self.blocks}

    @property
    def failed_block_ids(self) -> FrozenSet[int]:
        return frozenset(block.id for block in self.blocks if not block.post_passed)

    @property
    def usable_antenna_ids(self) -> Tuple[int, ...]:
        return tuple(a for block in self.blocks if block.post_passed for a in block.antenna_ids)

    @property
    def usable_antennas(self) -> int:
        return len(self.usable_antenna_ids)


def run_post(pn: PhysicalNode, fault_set: Iterable[int] = ()) -> PostReport:
    """
    Run the power-on self-test of every CCM block.

    Returns:
        PostReport whose blocks carry post_passed; the master block is
        the first block that passed

    Raises:
        InvalidFaultSet: If fault_set names blocks the PN does not have
        AllBlocksFailed: If no block passes
    """
    faults = frozenset(fault_set)
    unknown = faults - set(pn.block_ids)
    if unknown:
        raise InvalidFaultSet(pn.id, unknown)

    blocks = tuple(replace(block, post_passed=block.id not in faults) for block in pn.blocks)
    passing = [block for block in blocks if block.post_passed]
    if not passing:
        raise AllBlocksFailed(pn.id)

    if faults:
        logger.info(f"POST: {len(faults)} block(s) failed, master {passing[0].id}", extra={"pn_id": pn.id})
    return PostReport(pn_id=pn.id, blocks=blocks, master_block_id=passing[0].id)
