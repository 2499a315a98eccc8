# smmimo_sim/test_vnode.py
"""
Virtual node orchestration tests: pool, VMU, hierarchy, links, traffic
"""
import numpy as np
import pytest

from core.exceptions import (
    AntennaBusy,
    ForeignAntenna,
    ForeignUt,
    HierarchyCycle,
    InsufficientResources,
    InvalidLinkEndpoints,
    NoRoute,
    PgwPlacementError,
    RoleConstraintViolated,
    UnknownResource,
)
from sim_tools.bootstrap.stages import run_post
from sim_tools.vnode.hierarchy import PgwMode, VnHierarchy, assign_roles
from sim_tools.vnode.links import LinkKind, LinkRegistry, create_link, release_link
from sim_tools.vnode.resources import (
    EpcRole,
    ResourceClass,
    ResourcePool,
    VirtualResource,
    form_per_pn_nodes,
    form_virtual_node,
    map_physical_to_virtual,
    map_virtual_to_physical,
    release_virtual_node,
)
from sim_tools.vnode.traffic import (
    DestinationKind,
    TrafficFlow,
    build_offload_tree,
    generate_flows,
    internet_flow_count,
    offload_rows,
    route_traffic,
)


@pytest.fixture
def pool(small_scenario) -> ResourcePool:
    return ResourcePool.from_scenario(small_scenario)


def offload(pool, n_flows, fraction, seed, depth=2, fanout=2):
    tree = build_offload_tree(pool, depth, fanout)
    flows, ut_home = generate_flows(n_flows, fraction, tree.leaves, seed)
    reports = {}
    for mode in PgwMode:
        tree.hierarchy.place_gateways(mode)
        reports[mode] = route_traffic(flows, tree.hierarchy, mode, ut_home)
    return tree, flows, reports


# ============================================================
# Pool and VMU
# ============================================================

def test_pool_counts(small_scenario, pool):
    assert pool.total(ResourceClass.ANTENNA) == small_scenario.antenna_count
    assert pool.total(ResourceClass.COMPUTE) == 3 * 4 * 8


def test_failed_blocks_contribute_nothing(small_scenario):
    reports = {pn.id: run_post(pn, {0} if pn.id == 0 else ()) for pn in small_scenario.pns}
    pool = ResourcePool.from_scenario(small_scenario, reports)
    lost = small_scenario.pns[0].blocks[0].radio_count
    assert pool.total(ResourceClass.ANTENNA) == small_scenario.antenna_count - lost


def test_form_vn_spans_pns_in_order(pool):
    vn, vmu = form_virtual_node(pool, {ResourceClass.ANTENNA: 30, ResourceClass.COMPUTE: 2})
    assert vn.pn_ids == (0, 1)
    assert vn.count(ResourceClass.ANTENNA) == 30
    assert vmu.is_bijective()
    assert len(vmu.virtual_ids(vn.vn_id)) == 32
    for ordinal in range(30):
        physical = map_virtual_to_physical(vmu, VirtualResource(vn.vn_id, ResourceClass.ANTENNA, ordinal))
        assert map_physical_to_virtual(vmu, physical).ordinal == ordinal


def test_allocation_is_all_or_nothing(pool):
    free_before = len(pool.free(ResourceClass.ANTENNA))
    with pytest.raises(InsufficientResources) as info:
        form_virtual_node(pool, {ResourceClass.ANTENNA: 1, ResourceClass.STORAGE: 10 ** 6})
    assert info.value.details["resource_class"] == "storage"
    assert len(pool.free(ResourceClass.ANTENNA)) == free_before


def test_release_returns_resources(pool):
    vn, vmu = form_virtual_node(pool, {ResourceClass.ANTENNA: 5})
    virtual = VirtualResource(vn.vn_id, ResourceClass.ANTENNA, 0)
    release_virtual_node(pool, vn.vn_id)
    assert pool.allocated(ResourceClass.ANTENNA) == 0
    with pytest.raises(UnknownResource):
        map_virtual_to_physical(vmu, virtual)
    with pytest.raises(UnknownResource):
        release_virtual_node(pool, vn.vn_id)


def test_per_pn_nodes(small_scenario, pool):
    nodes = form_per_pn_nodes(pool, small_scenario)
    assert [vn.pn_ids for vn in nodes] == [(0,), (1,), (2,)]
    assert all(len(vn.antenna_ids) == 24 for vn in nodes)
    assert pool.free(ResourceClass.ANTENNA) == []


def test_vmu_stays_bijective_under_churn(small_scenario):
    rng = np.random.default_rng(12)
    pool = ResourcePool.from_scenario(small_scenario)
    live = {}
    for _ in range(200):
        if live and rng.uniform() < 0.4:
            vn_id = int(rng.choice(sorted(live)))
            release_virtual_node(pool, vn_id)
            del live[vn_id]
        else:
            request = {
                ResourceClass.ANTENNA: int(rng.integers(1, 20)),
                ResourceClass.COMPUTE: int(rng.integers(0, 4)),
            }
            try:
                vn, _ = form_virtual_node(pool, request)
            except InsufficientResources:
                continue
            live[vn.vn_id] = vn

        assert pool.vmu.is_bijective()
        assert len(pool.vmu) == sum(len(vn.resources) for vn in live.values())
        for resource_class in (ResourceClass.ANTENNA, ResourceClass.COMPUTE):
            held = sum(vn.count(resource_class) for vn in live.values())
            assert pool.allocated(resource_class) == held
            assert len(pool.free(resource_class)) + held == pool.total(resource_class)
        for vn in live.values():
            free = set(pool.free(ResourceClass.ANTENNA))
            for physical in vn.resources:
                assert physical not in free
                assert map_physical_to_virtual(pool.vmu, physical).vn_id == vn.vn_id


# ============================================================
# Hierarchy and roles
# ============================================================

def test_hierarchy_rejects_cycles():
    h = VnHierarchy()
    h.add(0)
    h.add(1, 0)
    h.add(2, 1)
    with pytest.raises(HierarchyCycle):
        h.set_parent(0, 2)
    with pytest.raises(UnknownResource):
        h.add(3, 9)
    assert h.ancestors(2) == [1, 0]
    assert h.depth(2) == 2
    assert h.lca(2, 1) == 1
    assert h.children(0) == [1]


def test_lca_across_trees_is_none():
    h = VnHierarchy()
    h.add(0)
    h.add(1)
    assert h.lca(0, 1) is None


def test_role_constraints(pool):
    vn, _ = form_virtual_node(pool, {ResourceClass.COMPUTE: 1})
    with pytest.raises(RoleConstraintViolated):
        assign_roles(vn, {EpcRole.VBS})
    with pytest.raises(RoleConstraintViolated):
        assign_roles(vn, {EpcRole.PGW})
    h = VnHierarchy()
    h.add(vn.vn_id)
    assert EpcRole.PGW in assign_roles(vn, {EpcRole.PGW, EpcRole.MME}, h).roles
    assert h.has_pgw(vn.vn_id)


def test_gateway_placement_is_checked():
    h = VnHierarchy()
    h.add(0)
    h.add(1, 0)
    h.place_gateways(PgwMode.CENTRALIZED)
    h.check_gateways(PgwMode.CENTRALIZED)
    with pytest.raises(PgwPlacementError):
        h.check_gateways(PgwMode.DISTRIBUTED)


# ============================================================
# Links
# ============================================================

def test_p2p_and_p2mp_links(pool):
    a, _ = form_virtual_node(pool, {ResourceClass.ANTENNA: 4})
    b, _ = form_virtual_node(pool, {ResourceClass.ANTENNA: 2})
    registry = LinkRegistry()
    p2p = create_link(registry, a, a.antenna_ids[:2], LinkKind.P2P, vn_b=b, antennas_b=b.antenna_ids)
    assert p2p.capacity_units == 2
    p2mp = create_link(registry, a, a.antenna_ids[2:], LinkKind.P2MP, ut_ids=[1, 2, 3], served_uts=[1, 2, 3, 4])
    assert p2mp.capacity_units == 2
    with pytest.raises(AntennaBusy):
        create_link(registry, a, a.antenna_ids[:1], LinkKind.P2MP, ut_ids=[1], served_uts=[1])
    release_link(registry, p2p.link_id)
    assert a.antenna_ids[0] not in registry.busy
    with pytest.raises(UnknownResource):
        release_link(registry, p2p.link_id)


def test_link_endpoint_errors(pool):
    a, _ = form_virtual_node(pool, {ResourceClass.ANTENNA: 2})
    b, _ = form_virtual_node(pool, {ResourceClass.ANTENNA: 2})
    registry = LinkRegistry()
    with pytest.raises(InvalidLinkEndpoints):
        create_link(registry, a, a.antenna_ids, LinkKind.P2P, vn_b=a, antennas_b=a.antenna_ids)
    with pytest.raises(ForeignAntenna):
        create_link(registry, a, b.antenna_ids, LinkKind.P2P, vn_b=b, antennas_b=b.antenna_ids)
    with pytest.raises(ForeignUt):
        create_link(registry, a, a.antenna_ids, LinkKind.P2MP, ut_ids=[7], served_uts=[1])
    assert registry.links == {}


# ============================================================
# Traffic and offload
# ============================================================

def test_internet_flow_count_rounds_half_up():
    assert internet_flow_count(100, 0.75) == 75
    assert internet_flow_count(2, 0.25) == 1
    assert internet_flow_count(10, 0.0) == 0


def test_offload_matches_closed_form(pool):
    tree, flows, reports = offload(pool, 100, 0.75, seed=3)
    total = sum(f.volume for f in flows)
    assert reports[PgwMode.DISTRIBUTED].internet_backbone_volume == 0.0
    assert reports[PgwMode.CENTRALIZED].internet_backbone_volume == 0.75 * total * 2
    assert reports[PgwMode.CENTRALIZED].internet_volume == 75.0


def test_distributed_never_loads_backbone_more(small_scenario):
    rng = np.random.default_rng(8)
    for i in range(100):
        pool = ResourcePool.from_scenario(small_scenario)
        n = int(rng.integers(1, 60))
        fraction = 0.0 if i % 4 == 0 else float(rng.uniform())
        _, _, reports = offload(pool, n, fraction, seed=int(rng.integers(0, 2 ** 32)))
        distributed = reports[PgwMode.DISTRIBUTED].backbone_volume
        centralized = reports[PgwMode.CENTRALIZED]
        assert distributed <= centralized.backbone_volume
        assert (distributed == centralized.backbone_volume) == (centralized.internet_volume == 0.0)


def test_internal_flow_goes_through_lca():
    h = VnHierarchy()
    for vn_id, parent in [(0, None), (1, 0), (2, 0), (3, 1), (4, 1), (5, 2)]:
        h.add(vn_id, parent)
    h.place_gateways(PgwMode.CENTRALIZED)
    flows = [
        TrafficFlow(0, 0, 2.0, DestinationKind.INTERNAL, dst_vn=4),
        TrafficFlow(1, 1, 1.0, DestinationKind.INTERNAL, dst_vn=5),
    ]
    report = route_traffic(flows, h, PgwMode.CENTRALIZED, {0: 3, 1: 3})
    assert report.hops == {0: 2, 1: 4}
    assert report.backbone_volume == 2.0 * 2 + 1.0 * 4
    assert report.link_volumes[(1, 3)] == 3.0


def test_unroutable_flows(pool):
    h = VnHierarchy()
    h.add(0)
    h.add(1)
    h.place_gateways(PgwMode.DISTRIBUTED)
    with pytest.raises(NoRoute):
        route_traffic([TrafficFlow(0, 9, 1.0)], h, PgwMode.DISTRIBUTED, {})
    with pytest.raises(NoRoute):
        route_traffic([TrafficFlow(0, 0, 1.0, DestinationKind.INTERNAL, dst_vn=1)], h, PgwMode.DISTRIBUTED, {0: 0})


def test_wrong_gateway_mode_is_refused():
    h = VnHierarchy()
    h.add(0)
    h.add(1, 0)
    h.place_gateways(PgwMode.CENTRALIZED)
    with pytest.raises(PgwPlacementError):
        route_traffic([], h, PgwMode.DISTRIBUTED, {})


def test_generate_flows_is_seeded(pool):
    tree = build_offload_tree(pool, 1, 3)
    a, homes = generate_flows(40, 0.5, tree.leaves, seed=4)
    b, _ = generate_flows(40, 0.5, tree.leaves, seed=4)
    assert a == b
    assert sum(f.dst_kind == DestinationKind.INTERNET for f in a) == 20
    assert set(homes.values()) <= set(tree.leaves)
    assert len(tree.leaves) == 3


def test_offload_rows_reduction(pool):
    _, _, reports = offload(pool, 100, 1.0, seed=1)
    rows = offload_rows([reports[PgwMode.CENTRALIZED], reports[PgwMode.DISTRIBUTED]],
                        reports[PgwMode.CENTRALIZED].backbone_volume)
    assert rows[0]["reduction_pct"] == 0.0
    assert rows[1]["reduction_pct"] == 100.0


def test_flow_volume_must_be_nonnegative():
    with pytest.raises(ValueError):
        TrafficFlow(0, 0, -1.0)
