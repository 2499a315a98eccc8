# smmimo_sim/sim_tools/bootstrap/messages.py
"""Control messages exchanged during initialization, and the event log."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional

import pandas as pd

from core.exceptions import MessageClassMismatch
from core.logger import get_logger
from sim_tools.bootstrap.stages import STAGE_ORDER, BootStage

logger = get_logger("bootstrap.messages")

BROADCAST = "broadcast"
EVENT_COLUMNS = ["sim_time", "class", "kind", "src", "dst"]


class MessageClass(str, Enum):
    CLASS1 = "Class1"
    CLASS2 = "Class2"


class MessageKind(str, Enum):
    ECHO = "Echo"
    ECHO_REPLY = "EchoReply"
    MAP_EXCHANGE = "MapExchange"
    VIRTUAL_MGMT = "VirtualMgmt"


KIND_CLASS = {
    MessageKind.ECHO: MessageClass.CLASS1,
    MessageKind.ECHO_REPLY: MessageClass.CLASS1,
    MessageKind.MAP_EXCHANGE: MessageClass.CLASS1,
    MessageKind.VIRTUAL_MGMT: MessageClass.CLASS2,
}


@dataclass(frozen=True)
class ControlMessage:
    """
    One control message.

    dst is None for a broadcast. The kind fixes the class: pathfinding
    traffic is Class1, virtualization management is Class2.
    """
    msg_class: MessageClass
    kind: MessageKind
    src: int
    dst: Optional[int]
    sim_time: int
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if KIND_CLASS[self.kind] != self.msg_class:
            raise MessageClassMismatch(self.kind.value, self.msg_class.value)
        if self.sim_time < 0:
            raise ValueError(f"sim_time must be >= 0 (got {self.sim_time})")

    @classmethod
    def of(cls, kind: MessageKind, src: int, dst: Optional[int], sim_time: int, **payload) -> "ControlMessage":
        return cls(KIND_CLASS[kind], kind, src, dst, sim_time, payload)


@dataclass(frozen=True)
class Rejection:
    sim_time: int
    pn_id: int
    reason: str


class EventLog:
    """
    Ordered record of delivered control messages.

    Class2 messages from a PN below BasicLinked are never logged; they
    are kept as rejections instead.
    """

    def __init__(self):
        self.messages: List[ControlMessage] = []
        self.rejections: List[Rejection] = []

    def emit(self, message: ControlMessage, src_stage: BootStage) -> bool:
        required = BootStage.BASIC_LINKED if message.msg_class == MessageClass.CLASS2 else BootStage.NOS_BOOTED
        if STAGE_ORDER.index(src_stage) < STAGE_ORDER.index(required):
            self.rejections.append(Rejection(
                message.sim_time,
                message.src,
                f"{message.kind.value} from stage {src_stage.value} requires {required.value}",
            ))
            logger.debug(f"Rejected {message.kind.value} from PN {message.src}", extra={"pn_id": message.src})
            return False
        self.messages.append(message)
        return True

    def count(self, kind: Optional[MessageKind] = None) -> int:
        if kind is None:
            return len(self.messages)
        return sum(1 for m in self.messages if m.kind == kind)

    def to_frame(self) -> pd.DataFrame:
        rows: List[Dict[str, Any]] = [
            {
                "sim_time": m.sim_time,
                "class": m.msg_class.value,
                "kind": m.kind.value,
                "src": m.src,
                "dst": BROADCAST if m.dst is None else m.dst,
            }
            for m in self.messages
        ]
        return pd.DataFrame(rows, columns=EVENT_COLUMNS)
