# smmimo_sim/sim_tools/bootstrap/commands.py
"""`init` subcommand: boot every PN, self-assemble, dump connection maps."""

from pathlib import Path

import click
import pandas as pd

from cli.runs import RunOutput, commit_run, common_options, load_run_config
from core.artifacts import frame_to_csv_text, sibling_path
from sim_tools.bootstrap.assembly import initialize_network
from sim_tools.bootstrap.routing import maps_to_rows
from sim_tools.topology.config import ScenarioConfig
from sim_tools.topology.scenario import build_scenario

MAP_COLUMNS = ["src", "dst", "next_hop", "cost_m", "generation"]
STAGE_COLUMNS = ["pn_id", "stage", "master_block_id", "usable_antennas", "rejections"]


def run_init(config: ScenarioConfig, out: Path) -> RunOutput:
    scenario = build_scenario(config)
    network = initialize_network(scenario, config.faults_by_pn())

    maps = pd.DataFrame(maps_to_rows(network.maps), columns=MAP_COLUMNS)
    stages = pd.DataFrame(
        [
            (
                pn_id,
                state.stage.value,
                network.post_reports[pn_id].master_block_id if pn_id in network.post_reports else -1,
                network.post_reports[pn_id].usable_antennas if pn_id in network.post_reports else 0,
                len(state.rejections),
            )
            for pn_id, state in sorted(network.states.items())
        ],
        columns=STAGE_COLUMNS,
    )

    output = RunOutput(primary=out)
    output.staged[out] = frame_to_csv_text(maps)
    output.staged[sibling_path(out, "events")] = frame_to_csv_text(network.log.to_frame())
    output.staged[sibling_path(out, "stages")] = frame_to_csv_text(stages)
    output.results = {
        "head": network.head,
        "excluded_pns": network.excluded,
        "stage_counts": network.stage_counts(),
        "messages": network.log.count(),
    }
    return output


@click.command("init")
@common_options("init.csv")
def init_command(config_path: str, out: str, seed):
    """Bootstrap PNs and dump the converged connection maps."""
    config = load_run_config(config_path, seed)
    commit_run("init", config, {"out": out}, run_init(config, Path(out)))
