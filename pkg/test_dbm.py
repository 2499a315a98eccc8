# smmimo_sim/test_dbm.py
"""
Pilot access procedure, Delay Based Maps, positioning and virtual cell tests
"""
import numpy as np
import pytest

from core.exceptions import (
    ConfigValidationError,
    DegenerateGeometry,
    EmptyServingSet,
    InsufficientAnchors,
    NoCoverage,
)
from sim_tools.bootstrap.stages import run_post
from sim_tools.dbm.cells import antenna_owners, cells_to_frame, check_isolation, form_virtual_cells
from sim_tools.dbm.commands import run_dbm
from sim_tools.dbm.maps import DbmEntry, DelayBasedMap, learn_dbms, update_dbm
from sim_tools.dbm.pilot import (
    PilotReception,
    broadcast_pilot,
    decide_serving_set,
    received_power,
    select_candidates,
    serving_receptions,
    survey_pilot,
)
from sim_tools.dbm.positioning import locate_from_dbm, locate_ut
from sim_tools.topology.config import PostFault
from sim_tools.topology.scenario import build_scenario


def random_receptions(rng: np.random.Generator, n: int, scale: float = 1.0):
    return [
        PilotReception(antenna_id=i, ut_id=0, delay_distance=float(rng.uniform(1, 500)), sqw=scale * float(s))
        for i, s in enumerate(rng.uniform(0.0, 1.0, size=n))
    ]


# ============================================================
# Pilot and candidates
# ============================================================

def test_received_power_floors_distance():
    assert received_power(1.0, 0.0, 3.8) == pytest.approx(1.0)
    assert received_power(2.0, 10.0, 2.0) == pytest.approx(0.02)


def test_broadcast_sorted_by_sqw(small_scenario):
    receptions = broadcast_pilot(small_scenario, 0)
    assert receptions[0].sqw == 1.0
    keys = [(-r.sqw, r.antenna_id) for r in receptions]
    assert keys == sorted(keys)


def test_broadcast_without_coverage(small_config):
    scenario = build_scenario(small_config.model_copy(update={"noise_floor": 10.0}))
    with pytest.raises(NoCoverage):
        broadcast_pilot(scenario, 0)


def test_candidates_nest_as_mu_grows():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        receptions = random_receptions(rng, int(rng.integers(1, 30)))
        low, high = sorted(rng.uniform(0.01, 1.0, size=2))
        assert set(select_candidates(receptions, high).antenna_ids) <= set(select_candidates(receptions, low).antenna_ids)


def test_candidates_are_scale_invariant():
    rng = np.random.default_rng(2)
    for _ in range(200):
        seed = int(rng.integers(0, 2 ** 32))
        base = random_receptions(np.random.default_rng(seed), 20)
        scaled = random_receptions(np.random.default_rng(seed), 20, scale=4.0)
        assert select_candidates(base, 0.5).antenna_ids == select_candidates(scaled, 0.5).antenna_ids


def test_mu_one_gives_singleton_on_distinct_powers():
    rng = np.random.default_rng(3)
    receptions = random_receptions(rng, 25)
    assert len(select_candidates(receptions, 1.0)) == 1


def test_select_candidates_rejects_bad_mu():
    with pytest.raises(ConfigValidationError):
        select_candidates([], 0.0)
    with pytest.raises(ConfigValidationError):
        select_candidates([], 1.5)


def test_empty_candidates_raise_on_decision():
    with pytest.raises(EmptyServingSet):
        decide_serving_set(select_candidates([], 0.5, ut_id=4))


def test_serve_quota_keeps_best():
    receptions = [PilotReception(i, 0, 10.0, s) for i, s in enumerate([0.9, 1.0, 0.95, 0.2])]
    candidates = select_candidates(receptions, 0.5)
    assert candidates.antenna_ids == (1, 2, 0)
    assert decide_serving_set(candidates, 2) == (1, 2)
    assert decide_serving_set(candidates) == (1, 2, 0)


def test_serving_receptions_match_candidate_path(small_scenario):
    for ut_id in range(small_scenario.ut_count):
        survey = survey_pilot(small_scenario, ut_id)
        fast = [r.antenna_id for r in serving_receptions(survey, 0.3, 5)]
        slow = decide_serving_set(select_candidates(broadcast_pilot(small_scenario, ut_id), 0.3), 5)
        assert tuple(fast) == slow


def test_range_noise_is_seeded(small_config):
    scenario = build_scenario(small_config.model_copy(update={"range_noise_sigma_m": 2.0}))
    a = survey_pilot(scenario, 1, epoch=0).delay_distances
    b = survey_pilot(scenario, 1, epoch=0).delay_distances
    c = survey_pilot(scenario, 1, epoch=1).delay_distances
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ============================================================
# Delay Based Maps
# ============================================================

def test_update_dbm_flags_major_changes():
    dbm = DelayBasedMap(7, {1: DbmEntry(10.0, 0.5, 0), 2: DbmEntry(20.0, 0.5, 0)})
    update = update_dbm(dbm, [
        PilotReception(7, 1, 10.5, 0.505),
        PilotReception(7, 2, 25.0, 0.5),
        PilotReception(7, 3, 30.0, 0.1),
        PilotReception(8, 4, 30.0, 0.1),
    ], epoch=1)
    assert update.major_ut_ids == (2, 3)
    assert set(update.dbm.entries) == {1, 2, 3}
    assert update.dbm.entries[1].last_update_epoch == 1
    assert dbm.entries[2].delay_distance == 20.0


def test_learning_settles_without_noise(small_scenario):
    learning = learn_dbms(small_scenario)
    assert learning.epochs == 2
    assert learning.major_per_epoch[-1] == 0
    assert learning.uncovered == []
    for ut_id, antennas in learning.serving_sets.items():
        for antenna_id in antennas:
            assert ut_id in learning.dbms[antenna_id].entries
    assert list(learning.to_frame().columns) == ["antenna_id", "ut_id", "delay_distance_m", "sqw", "epoch"]


def test_learning_skips_antennas_that_failed_post(small_config, tmp_path):
    config = small_config.model_copy(update={
        "pn_count": 1,
        "antennas_per_pn": 8,
        "blocks_per_pn": 2,
        "ut_count": 6,
        "mu": 0.01,
        "post_faults": [PostFault(pn_id=0, block_ids=[1])],
    })
    scenario = build_scenario(config)
    usable = set(run_post(scenario.pns[0], {1}).usable_antenna_ids)
    assert usable == set(scenario.pns[0].blocks[0].antenna_ids)

    learning = learn_dbms(scenario, usable)
    assert learning.dbms
    assert set(learning.dbms) <= usable
    for antennas in learning.serving_sets.values():
        assert set(antennas) <= usable

    output = run_dbm(config, tmp_path / "dbm.csv", locate=False)
    assert output.results["virtual_cells"] == 1
    assert output.results["leakage"] == 0.0
    assert set(learn_dbms(scenario).dbms) - usable


# ============================================================
# Positioning
# ============================================================

def test_locate_recovers_random_positions():
    rng = np.random.default_rng(5)
    solved = 0
    while solved < 200:
        anchors_xy = rng.uniform(0, 1000, size=(int(rng.integers(3, 9)), 2))
        centered = anchors_xy - anchors_xy.mean(axis=0)
        s = np.linalg.svd(centered, compute_uv=False)
        if s[-1] < 1e-2 * s[0]:
            continue
        ut = rng.uniform(0, 1000, size=2)
        anchors = [((x, y), float(np.hypot(x - ut[0], y - ut[1]))) for x, y in anchors_xy]
        assert np.hypot(*(locate_ut(anchors) - ut)) < 1e-6
        solved += 1


def test_collinear_anchors_are_degenerate():
    rng = np.random.default_rng(6)
    for _ in range(100):
        origin = rng.uniform(0, 1000, size=2)
        direction = rng.normal(size=2)
        ts = rng.uniform(-100, 100, size=int(rng.integers(3, 8)))
        anchors = [(tuple(origin + t * direction), float(rng.uniform(1, 100))) for t in ts]
        with pytest.raises(DegenerateGeometry):
            locate_ut(anchors)


def test_coincident_anchors_are_degenerate():
    with pytest.raises(DegenerateGeometry):
        locate_ut([((1.0, 1.0), 2.0)] * 4)


def test_too_few_anchors():
    with pytest.raises(InsufficientAnchors):
        locate_ut([((0.0, 0.0), 1.0), ((1.0, 0.0), 1.0)])


def test_locate_from_learned_maps(small_config):
    config = small_config.model_copy(update={"mu": 0.05})
    scenario = build_scenario(config)
    learning = learn_dbms(scenario)
    for ut_id in list(learning.serving_sets)[:5]:
        try:
            estimate = locate_from_dbm(scenario, learning.dbms, ut_id)
        except (InsufficientAnchors, DegenerateGeometry):
            continue
        assert np.hypot(*(estimate - scenario.ut_positions[ut_id])) < 1e-3


# ============================================================
# Virtual cells
# ============================================================

def test_plurality_vote_with_lowest_vn_on_tie():
    owner = {0: 0, 1: 0, 2: 1, 3: 1, 4: 1}
    cells = form_virtual_cells({10: (0, 2), 11: (2, 3, 0), 12: (4,)}, owner)
    by_vn = {c.vn_id: c for c in cells}
    assert by_vn[0].ut_ids == frozenset({10})
    assert by_vn[1].ut_ids == frozenset({11, 12})
    assert by_vn[0].antenna_ids == frozenset({0})
    assert by_vn[1].antenna_ids == frozenset({2, 3, 4})


def test_unowned_serving_set_raises():
    with pytest.raises(EmptyServingSet):
        form_virtual_cells({5: (9,)}, {0: 0})


def test_isolation_counts_leakage():
    owner = {0: 0, 1: 0, 2: 1, 3: 1}
    serving = {10: (0, 1, 2), 11: (2, 3)}
    cells = form_virtual_cells(serving, owner)
    report = check_isolation(cells, serving)
    assert report.total_slots == 5
    assert report.outside_slots == 1
    assert report.leakage == pytest.approx(0.2)
    row = report.pairs.iloc[0]
    assert (row.vc_a, row.vc_b, row.shared_antennas, row.cross_service) == (0, 1, 0, 1)
    frame = cells_to_frame(cells, serving)
    assert len(frame) == 4


def test_antenna_owners_follow_pns(small_scenario):
    owner = antenna_owners(small_scenario, {0: 5, 2: 6})
    assert owner[0] == 5
    assert small_scenario.antennas_of_pn(1)[0] not in owner
    assert owner[int(small_scenario.antennas_of_pn(2)[0])] == 6
