# smmimo_sim/sim_tools/vnode/commands.py
"""`offload` subcommand: centralized versus distributed PGW backbone load."""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import click
import pandas as pd

from cli.runs import RunOutput, commit_run, common_options, load_run_config
from core.artifacts import frame_to_csv_text
from sim_tools.topology.config import ScenarioConfig
from sim_tools.topology.scenario import build_scenario
from sim_tools.vnode.hierarchy import PgwMode
from sim_tools.vnode.resources import ResourcePool
from sim_tools.vnode.traffic import (
    OFFLOAD_COLUMNS,
    TrafficFlow,
    TrafficReport,
    build_offload_tree,
    generate_flows,
    offload_rows,
    route_traffic,
)

MODES = ["centralized", "distributed", "both"]


@dataclass
class OffloadRun:
    flows: List[TrafficFlow]
    reports: Dict[PgwMode, TrafficReport]


def run_offload_experiment(
    config: ScenarioConfig,
    n_flows: int = 100,
    internet_fraction: Optional[float] = None,
    depth: int = 2,
    fanout: int = 2,
) -> OffloadRun:
    """Route one seeded flow set under both gateway modes."""
    fraction = config.internet_fraction if internet_fraction is None else internet_fraction

    pool = ResourcePool.from_scenario(build_scenario(config))
    tree = build_offload_tree(pool, depth, fanout)
    flows, ut_home = generate_flows(n_flows, fraction, tree.leaves, config.seed)

    reports = {}
    for mode in (PgwMode.CENTRALIZED, PgwMode.DISTRIBUTED):
        tree.hierarchy.place_gateways(mode)
        reports[mode] = route_traffic(flows, tree.hierarchy, mode, ut_home)
    return OffloadRun(flows=flows, reports=reports)


def selected_modes(mode: str) -> List[PgwMode]:
    return list(PgwMode) if mode == "both" else [PgwMode(mode)]


def run_offload(
    config: ScenarioConfig,
    out: Path,
    flows: int = 100,
    internet_fraction: Optional[float] = None,
    mode: str = "both",
    depth: int = 2,
    fanout: int = 2,
) -> RunOutput:
    experiment = run_offload_experiment(config, flows, internet_fraction, depth, fanout)
    baseline = experiment.reports[PgwMode.CENTRALIZED].backbone_volume
    rows = offload_rows([experiment.reports[m] for m in selected_modes(mode)], baseline)

    output = RunOutput(primary=out)
    output.staged[out] = frame_to_csv_text(pd.DataFrame(rows, columns=OFFLOAD_COLUMNS))
    output.results = {
        m.value: {
            "internet_volume": r.internet_volume,
            "internet_backbone_volume": r.internet_backbone_volume,
        }
        for m, r in experiment.reports.items()
    }
    return output


@click.command("offload")
@common_options("offload.csv")
@click.option("--flows", type=click.IntRange(0), default=100, show_default=True, help="Number of flows")
@click.option("--internet-fraction", type=click.FloatRange(0.0, 1.0), default=None,
              help="Share of Internet-bound flows (default: config)")
@click.option("--mode", type=click.Choice(MODES), default="both", show_default=True)
@click.option("--depth", type=click.IntRange(0), default=2, show_default=True, help="Uplink hops from leaf to root")
@click.option("--fanout", type=click.IntRange(1), default=2, show_default=True)
def offload_command(config_path: str, out: str, seed, flows, internet_fraction, mode, depth, fanout):
    """Compare backbone load under centralized and distributed PGWs."""
    config = load_run_config(config_path, seed)
    options = {
        "out": out, "flows": flows, "internet_fraction": internet_fraction,
        "mode": mode, "depth": depth, "fanout": fanout,
    }
    output = run_offload(config, Path(out), flows, internet_fraction, mode, depth, fanout)
    commit_run("offload", config, options, output)
