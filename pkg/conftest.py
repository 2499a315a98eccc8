# smmimo_sim/conftest.py
"""Shared fixtures: small scenarios that run in milliseconds."""

import json
from pathlib import Path

import pytest

from sim_tools.topology.config import ScenarioConfig
from sim_tools.topology.scenario import build_scenario


@pytest.fixture
def small_config() -> ScenarioConfig:
    return ScenarioConfig(
        pn_count=3,
        antennas_per_pn=24,
        ut_count=18,
        region_extent_m=300.0,
        radio_range_m=400.0,
        blocks_per_pn=4,
        alpha_list=[1.0, 0.1],
        snr_grid_db=[0.0, 10.0],
        mc_trials=8,
        seed=11,
    )


@pytest.fixture
def small_scenario(small_config):
    return build_scenario(small_config)


@pytest.fixture
def write_config(tmp_path: Path):
    """Write a JSON config into tmp_path and return its path as a string."""
    def _write(payload: dict, name: str = "scenario.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)
    return _write
