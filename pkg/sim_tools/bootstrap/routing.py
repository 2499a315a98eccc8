# smmimo_sim/sim_tools/bootstrap/routing.py
"""
Neighbor discovery and connection maps.

Routes are ranked by (cost, next hop, node path); since every path
starts at the source, comparing (cost, path) tuples applies exactly
that order. Costs are always summed from the source outward so that
the same path yields the same float no matter how it was found.
PNs exchange the neighbor maps they have discovered, so co-located
PNs joined by a zero-length link converge like any others.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from core.exceptions import NonConvergence, StageViolation, UnknownPn
from core.logger import get_logger
from sim_tools.bootstrap.stages import BootStage, PnState
from sim_tools.topology.models import Scenario

logger = get_logger("bootstrap.routing")

NeighborGraph = Dict[int, Dict[int, float]]


@dataclass(frozen=True)
class RouteEntry:
    next_hop: int
    cost_m: float
    path: Tuple[int, ...]


@dataclass
class ConnectionMap:
    """
    Routing table of one source PN; includes a zero-cost self entry.

    links holds the neighbor maps this PN has learned so far, keyed by
    the PN that discovered them.
    """
    source: int
    routes: Dict[int, RouteEntry] = field(default_factory=dict)
    generation: int = 0
    links: NeighborGraph = field(default_factory=dict)

    def reachable(self) -> List[int]:
        return sorted(self.routes)

    def same_routes(self, other: "ConnectionMap") -> bool:
        return self.source == other.source and self.routes == other.routes


ConnectionMaps = Dict[int, ConnectionMap]


# ============================================================
# Discovery
# ============================================================

def discover_neighbors(
    scenario: Scenario,
    pn_id: int,
    exclude: Iterable[int] = (),
    state: Optional[PnState] = None,
) -> List[Tuple[int, float]]:
    """
    PNs within radio range of pn_id, as (neighbor id, distance).

    A link needs both ends in range, so the smaller of the two radio
    ranges applies; this keeps the neighbor relation symmetric.

    Raises:
        StageViolation: If state is given and the NOS has not booted
    """
    if state is not None and not state.at_least(BootStage.NOS_BOOTED):
        raise StageViolation(pn_id, state.stage.value, BootStage.NOS_BOOTED.value)

    excluded = set(exclude)
    me = scenario.pns[pn_id]
    found = []
    for other in scenario.pns:
        if other.id == pn_id or other.id in excluded:
            continue
        distance = math.dist(me.position, other.position)
        if distance <= min(me.radio_range_m, other.radio_range_m):
            found.append((other.id, distance))
    found.sort(key=lambda item: (item[1], item[0]))
    return found


def neighbor_graph(scenario: Scenario, exclude: Iterable[int] = ()) -> NeighborGraph:
    """Symmetric neighbor graph over all PNs not in exclude."""
    excluded = set(exclude)
    return {
        pn.id: dict(discover_neighbors(scenario, pn.id, excluded))
        for pn in scenario.pns
        if pn.id not in excluded
    }


def without_node(graph: NeighborGraph, dead: int) -> NeighborGraph:
    return {
        node: {n: w for n, w in edges.items() if n != dead}
        for node, edges in graph.items()
        if node != dead
    }


# ============================================================
# Shortest paths
# ============================================================

def build_connection_map(graph: NeighborGraph, source: int) -> ConnectionMap:
    """
    Shortest-path tree of source over the neighbor graph (Dijkstra).

    Unreachable destinations are absent. Ties are broken by smaller next
    hop, then lexicographically smaller node path. The neighbor maps of
    every reachable PN are recorded as the links the map was built from.

    Example:
        >>> g = {0: {1: 3.0, 2: 5.0}, 1: {0: 3.0, 2: 4.0}, 2: {0: 5.0, 1: 4.0}}
        >>> build_connection_map(g, 0).routes[2].path
        (0, 2)
    """
    best: Dict[int, Tuple[float, Tuple[int, ...]]] = {source: (0.0, (source,))}
    done = set()
    heap = [(0.0, (source,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        for neighbor, weight in graph.get(node, {}).items():
            if neighbor in done:
                continue
            candidate = (cost + weight, path + (neighbor,))
            if neighbor not in best or candidate < best[neighbor]:
                best[neighbor] = candidate
                heapq.heappush(heap, candidate)

    routes = {
        dst: RouteEntry(next_hop=path[1] if len(path) > 1 else source, cost_m=cost, path=path)
        for dst, (cost, path) in best.items()
    }
    links = {node: dict(graph[node]) for node in best if node in graph}
    return ConnectionMap(source=source, routes=routes, links=links)


def initial_connection_maps(graph: NeighborGraph) -> ConnectionMaps:
    """Each PN knows itself and its direct neighbors only."""
    maps: ConnectionMaps = {}
    for source, edges in graph.items():
        routes = {source: RouteEntry(source, 0.0, (source,))}
        for neighbor, weight in edges.items():
            routes[neighbor] = RouteEntry(neighbor, weight, (source, neighbor))
        maps[source] = ConnectionMap(source=source, routes=routes, links={source: dict(edges)})
    return maps


def _merge_links(graph: NeighborGraph, source: int, maps: ConnectionMaps) -> NeighborGraph:
    links = {source: dict(graph.get(source, {}))}
    for neighbor in sorted(graph.get(source, {})):
        links.setdefault(neighbor, dict(graph.get(neighbor, {})))
        if neighbor in maps:
            for node, edges in maps[neighbor].links.items():
                links.setdefault(node, dict(edges))
    for node, edges in maps[source].links.items():
        links.setdefault(node, dict(edges))
    return links


def exchange_neighbor_maps(maps: ConnectionMaps, graph: NeighborGraph) -> ConnectionMaps:
    """
    Synchronous exchange rounds until no map changes.

    Every round each PN merges the neighbor maps its direct neighbors had
    learned by the previous round into its own, then recomputes its
    routes over everything it has learned. After r rounds a PN holds the
    neighbor maps of every PN within r hops, so the routes equal
    build_connection_map() on the full graph, zero-length links between
    co-located PNs included. The generation of every map grows by one
    per round, the confirming round included.

    Raises:
        NonConvergence: If more rounds than PNs are needed
    """
    limit = len(maps)
    current = maps
    rounds = 0
    while True:
        rounds += 1
        if rounds > max(limit, 1):
            raise NonConvergence(rounds - 1, limit)
        updated = {}
        for source, cmap in current.items():
            links = _merge_links(graph, source, current)
            routes = build_connection_map(links, source).routes
            updated[source] = ConnectionMap(source, routes, cmap.generation + 1, links)
        changed = any(
            not updated[s].same_routes(current[s]) or updated[s].links != current[s].links
            for s in current
        )
        current = updated
        logger.debug(f"Exchange round {rounds}: {'changed' if changed else 'stable'}", extra={"round": rounds})
        if not changed:
            return current


def converge(graph: NeighborGraph) -> ConnectionMaps:
    """Build converged maps from scratch over a neighbor graph."""
    return exchange_neighbor_maps(initial_connection_maps(graph), graph)


def handle_failure(maps: ConnectionMaps, dead_pn_id: int, graph: NeighborGraph) -> ConnectionMaps:
    """
    Purge a dead PN and reassemble the survivors.

    The result equals converge() on the graph without the dead PN;
    a partitioned network is valid output.

    Raises:
        UnknownPn: If dead_pn_id has no map
    """
    if dead_pn_id not in maps:
        raise UnknownPn(dead_pn_id)
    residual = without_node(graph, dead_pn_id)
    logger.info(f"PN {dead_pn_id} failed; reassembling {len(residual)} PNs", extra={"pn_id": dead_pn_id})
    return converge(residual)


def maps_to_rows(maps: ConnectionMaps) -> List[dict]:
    """Flatten maps to src,dst,next_hop,cost_m,generation rows sorted by (src, dst)."""
    rows = []
    for source in sorted(maps):
        cmap = maps[source]
        for dst in sorted(cmap.routes):
            entry = cmap.routes[dst]
            rows.append({
                "src": source,
                "dst": dst,
                "next_hop": entry.next_hop,
                "cost_m": entry.cost_m,
                "generation": cmap.generation,
            })
    return rows
