# smmimo_sim/sim_tools/bootstrap/assembly.py
"""
Self-assembly and full network initialization.

Self-assembly runs four steps: echo discovery, initial maps from direct
neighbors, map exchange until fixpoint, final connection scheme.
initialize_network wraps it in the four boot stages and finishes with
Class2 virtualization management from the network head.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional

from core.exceptions import AllBlocksFailed
from core.logger import get_logger
from sim_tools.bootstrap.messages import ControlMessage, EventLog, MessageKind
from sim_tools.bootstrap.routing import (
    ConnectionMaps,
    NeighborGraph,
    exchange_neighbor_maps,
    initial_connection_maps,
    neighbor_graph,
)
from sim_tools.bootstrap.stages import BootEvent, BootStage, PnState, PostReport, advance_stage, run_post
from sim_tools.topology.models import Scenario

logger = get_logger("bootstrap.assembly")


@dataclass
class AssemblyResult:
    maps: ConnectionMaps
    graph: NeighborGraph
    rounds: int
    finished_at: int


@dataclass
class NetworkInit:
    states: Dict[int, PnState]
    post_reports: Dict[int, PostReport]
    excluded: List[int]
    maps: ConnectionMaps
    graph: NeighborGraph
    head: Optional[int]
    log: EventLog = field(default_factory=EventLog)

    def stage_counts(self) -> Dict[str, int]:
        counts = {stage.value: 0 for stage in BootStage}
        for state in self.states.values():
            counts[state.stage.value] += 1
        return counts


def self_assemble(
    scenario: Scenario,
    alive: Optional[Iterable[int]] = None,
    log: Optional[EventLog] = None,
    states: Optional[Mapping[int, PnState]] = None,
    start_time: int = 0,
) -> AssemblyResult:
    """
    Run the self-assembly algorithm over the alive PNs.

    Args:
        scenario: Placed scenario
        alive: PN ids taking part (default: all)
        log: Event log receiving Echo/EchoReply/MapExchange messages
        states: Boot state per PN, used to gate messages in the log
        start_time: Logical time of the echo broadcast

    Returns:
        AssemblyResult with converged maps and the number of exchange rounds
    """
    alive_set = set(range(len(scenario.pns))) if alive is None else set(alive)
    excluded = [pn.id for pn in scenario.pns if pn.id not in alive_set]
    log = log if log is not None else EventLog()

    def stage_of(pn_id: int) -> BootStage:
        return states[pn_id].stage if states is not None else BootStage.NOS_BOOTED

    # step 1: echo discovery
    graph = neighbor_graph(scenario, exclude=excluded)
    for pn_id in sorted(graph):
        log.emit(ControlMessage.of(MessageKind.ECHO, pn_id, None, start_time), stage_of(pn_id))
        for neighbor in sorted(graph[pn_id]):
            log.emit(ControlMessage.of(MessageKind.ECHO_REPLY, neighbor, pn_id, start_time + 1), stage_of(neighbor))

    # step 2 + 3: initial maps, then exchange to fixpoint
    initial = initial_connection_maps(graph)
    maps = exchange_neighbor_maps(initial, graph)
    rounds = max((cmap.generation for cmap in maps.values()), default=0)
    for r in range(rounds):
        for pn_id in sorted(graph):
            for neighbor in sorted(graph[pn_id]):
                log.emit(
                    ControlMessage.of(MessageKind.MAP_EXCHANGE, pn_id, neighbor, start_time + 2 + r, round=r + 1),
                    stage_of(pn_id),
                )

    logger.info(f"Self-assembly converged over {len(graph)} PNs", extra={"round": rounds})
    return AssemblyResult(maps=maps, graph=graph, rounds=rounds, finished_at=start_time + 2 + rounds)


def initialize_network(scenario: Scenario, post_faults: Optional[Mapping[int, FrozenSet[int]]] = None) -> NetworkInit:
    """
    Drive every PN through the four initialization stages.

    PNs whose blocks all fail POST stay at PowerOn and take no part.
    The network head is the lowest alive PN id; only PNs it can reach
    receive VirtualMgmt and become VirtualReady.
    """
    post_faults = post_faults or {}
    log = EventLog()
    states: Dict[int, PnState] = {pn.id: PnState(pn.id) for pn in scenario.pns}
    reports: Dict[int, PostReport] = {}
    excluded: List[int] = []

    # stage 1: POST, reported to the master block
    for pn in scenario.pns:
        try:
            reports[pn.id] = run_post(pn, post_faults.get(pn.id, frozenset()))
        except AllBlocksFailed:
            logger.warning("PN excluded: all CCM blocks failed POST", extra={"pn_id": pn.id})
            excluded.append(pn.id)
            continue
        states[pn.id] = advance_stage(states[pn.id], BootEvent.POST_COMPLETE, 0)

    alive = sorted(reports)
    for pn_id in alive:
        states[pn_id] = advance_stage(states[pn_id], BootEvent.NOS_BOOT, 1)

    # stage 2: class-1 pathfinding
    assembly = self_assemble(scenario, alive=alive, log=log, states=states, start_time=2)
    t = assembly.finished_at
    for pn_id in alive:
        states[pn_id] = advance_stage(states[pn_id], BootEvent.LINKS_ESTABLISHED, t)

    # stage 3: class-2 virtualization management from the head
    head = alive[0] if alive else None
    if head is not None:
        t += 1
        for dst in assembly.maps[head].reachable():
            message = ControlMessage.of(MessageKind.VIRTUAL_MGMT, head, dst, t)
            if log.emit(message, states[head].stage):
                states[dst] = advance_stage(states[dst], message, t)
                states[dst] = advance_stage(states[dst], BootEvent.VIRTUAL_MGMT_READY, t)

    ready = sum(1 for s in states.values() if s.stage == BootStage.VIRTUAL_READY)
    logger.info(f"Network initialized: {ready}/{len(states)} PNs VirtualReady, head {head}")
    return NetworkInit(
        states=states,
        post_reports=reports,
        excluded=excluded,
        maps=assembly.maps,
        graph=assembly.graph,
        head=head,
        log=log,
    )
