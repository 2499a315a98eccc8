# smmimo_sim/test_topology.py
"""
Scenario configuration and layout tests
"""
import numpy as np
import pytest

from core.exceptions import ConfigFileNotFound, ConfigValidationError, MissingSeed
from core.rng import Stream, complex_gaussian_matrix, complex_gaussian_row, stream
from sim_tools.topology.config import ScenarioConfig, load_config, validate_config
from sim_tools.topology.scenario import build_scenario, split_blocks


# ============================================================
# Config
# ============================================================

def test_default_config_is_valid():
    assert validate_config(ScenarioConfig()) == []


def test_validate_reports_every_violation():
    config = ScenarioConfig(mu=0.0, alpha_list=[0.5, 1.5], internet_fraction=1.2, pn_count=0)
    issues = validate_config(config)
    assert "mu out of (0,1] (got 0.0)" in issues
    assert any(issue.startswith("alpha out of (0,1]") for issue in issues)
    assert any(issue.startswith("internet_fraction") for issue in issues)
    assert any(issue.startswith("pn_count") for issue in issues)


def test_seed_outside_u64_is_reported():
    issues = validate_config(ScenarioConfig(seed=2 ** 64))
    assert any(issue.startswith("seed") for issue in issues)


def test_unknown_post_fault_block_is_reported():
    config = ScenarioConfig(post_faults=[{"pn_id": 0, "block_ids": [9]}])
    assert any("unknown blocks" in issue for issue in validate_config(config))


def test_users_per_cell_and_interferers():
    config = ScenarioConfig()
    assert config.users_per_cell == 100
    assert config.interferers == 100
    assert ScenarioConfig(k_interferers=7).interferers == 7


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigFileNotFound):
        load_config(tmp_path / "missing.json")


def test_load_config_rejects_unknown_fields(write_config):
    path = write_config({"pn_count": 2, "antenas_per_pn": 10})
    with pytest.raises(ConfigValidationError) as info:
        load_config(path)
    assert any("antenas_per_pn" in issue for issue in info.value.issues)
    report = info.value.to_dict()
    assert report["error"] == "CONFIG_VALIDATION_ERROR"
    assert report["details"]["path"] == str(path)


def test_load_config_roundtrips_fields(write_config):
    config = load_config(write_config({"pn_count": 2, "seed": 5, "channel_model": "pathloss"}))
    assert config.pn_count == 2
    assert config.seed == 5
    assert config.channel_model == "pathloss"


# ============================================================
# Layout
# ============================================================

def test_split_blocks_is_even_with_remainder_first():
    assert split_blocks(10, 4) == [3, 3, 2, 2]
    assert split_blocks(3, 8) == [1, 1, 1]
    assert sum(split_blocks(1000, 4)) == 1000


def test_build_scenario_counts_and_ids(small_config, small_scenario):
    assert small_scenario.antenna_count == 3 * 24
    assert small_scenario.ut_count == 18
    for pn in small_scenario.pns:
        assert [b.id for b in pn.blocks] == list(range(len(pn.blocks)))
        assert pn.total_antennas == 24
        assert pn.master_block.id == 0
        assert list(pn.antenna_ids) == small_scenario.antennas_of_pn(pn.id).tolist()
    for antenna in small_scenario.antennas:
        assert small_scenario.pn_of_antenna(antenna.id) == antenna.pn_id


def test_antennas_stay_within_aperture(small_config, small_scenario):
    for antenna in small_scenario.antennas:
        center = np.array(small_scenario.pns[antenna.pn_id].position)
        assert np.hypot(*(np.array(antenna.position) - center)) <= small_config.pn_aperture_m + 1e-9


def test_build_scenario_is_deterministic(small_config):
    a = build_scenario(small_config)
    b = build_scenario(small_config)
    assert np.array_equal(a.antenna_positions, b.antenna_positions)
    assert np.array_equal(a.ut_positions, b.ut_positions)


def test_different_seeds_move_uts(small_config):
    a = build_scenario(small_config, 7)
    b = build_scenario(small_config, 8)
    assert a.seed == 7 and b.seed == 8
    assert not np.array_equal(a.ut_positions, b.ut_positions)
    assert np.array_equal(a.ut_positions, build_scenario(small_config, 7).ut_positions)


def test_changing_ut_count_keeps_pn_layout(small_config):
    a = build_scenario(small_config)
    b = build_scenario(small_config.model_copy(update={"ut_count": 5}))
    assert np.array_equal(a.pn_positions, b.pn_positions)
    assert np.array_equal(a.antenna_positions, b.antenna_positions)


def test_position_overrides(small_config):
    pns = [(10.0, 10.0), (100.0, 10.0), (50.0, 90.0)]
    scenario = build_scenario(small_config, pn_positions=pns)
    assert scenario.pns[1].position == (100.0, 10.0)
    with pytest.raises(ConfigValidationError):
        build_scenario(small_config, ut_positions=[(0.0, 0.0)])


def test_missing_seed_raises(small_config):
    with pytest.raises(MissingSeed):
        build_scenario(small_config.model_copy(update={"seed": None}))


def test_zero_uts_is_allowed(small_config):
    scenario = build_scenario(small_config.model_copy(update={"ut_count": 0}))
    assert scenario.ut_count == 0


# ============================================================
# Random streams
# ============================================================

def test_streams_are_keyed_by_tag():
    a = stream(3, Stream.UT_LAYOUT).uniform(size=4)
    b = stream(3, Stream.PN_LAYOUT).uniform(size=4)
    assert not np.array_equal(a, b)


def test_gaussian_entry_independent_of_shape():
    small = complex_gaussian_matrix(5, 2, 3, 4)
    large = complex_gaussian_matrix(5, 2, 6, 10)
    assert np.array_equal(small, large[:3, :4])


def test_gaussian_rows_have_unit_power():
    row = complex_gaussian_row(9, Stream.CHANNEL, 0, 0, 20000)
    assert np.mean(np.abs(row) ** 2) == pytest.approx(1.0, abs=0.05)
