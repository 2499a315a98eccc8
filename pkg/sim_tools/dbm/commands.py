# smmimo_sim/sim_tools/dbm/commands.py
"""`dbm` subcommand: learn Delay Based Maps, form virtual cells, report isolation."""

from pathlib import Path

import click
import numpy as np
import pandas as pd

from cli.runs import RunOutput, commit_run, common_options, load_run_config
from core.artifacts import frame_to_csv_text, sibling_path
from core.exceptions import DbmError
from core.logger import get_logger
from sim_tools.bootstrap.assembly import initialize_network
from sim_tools.dbm.cells import antenna_owners, cells_to_frame, check_isolation, form_virtual_cells
from sim_tools.dbm.maps import learn_dbms
from sim_tools.dbm.positioning import locate_from_dbm
from sim_tools.topology.config import ScenarioConfig
from sim_tools.topology.scenario import build_scenario
from sim_tools.vnode.resources import ResourcePool, form_per_pn_nodes

logger = get_logger("dbm.commands")

POSITION_COLUMNS = ["ut_id", "true_x_m", "true_y_m", "est_x_m", "est_y_m", "error_m"]


def run_dbm(config: ScenarioConfig, out: Path, locate: bool = True) -> RunOutput:
    scenario = build_scenario(config)
    network = initialize_network(scenario, config.faults_by_pn())

    # one VN per booted PN; antennas on failed blocks neither own slots nor hear pilots
    pool = ResourcePool.from_scenario(scenario, network.post_reports)
    pn_to_vn = {vn.pn_ids[0]: vn.vn_id for vn in form_per_pn_nodes(pool, scenario)}
    usable = _usable_antennas(network.post_reports)
    owner = {a: vn for a, vn in antenna_owners(scenario, pn_to_vn).items() if a in usable}

    learning = learn_dbms(scenario, usable)
    serving = learning.serving_sets

    cells = form_virtual_cells(serving, owner)
    isolation = check_isolation(cells, serving)

    output = RunOutput(primary=out)
    output.staged[out] = frame_to_csv_text(learning.to_frame())
    output.staged[sibling_path(out, "cells")] = frame_to_csv_text(cells_to_frame(cells, serving))
    output.staged[sibling_path(out, "isolation")] = frame_to_csv_text(isolation.pairs)
    if locate:
        output.staged[sibling_path(out, "positions")] = frame_to_csv_text(_positions(scenario, learning))
    output.results = {
        "epochs": learning.epochs,
        "major_per_epoch": learning.major_per_epoch,
        "uncovered_uts": learning.uncovered,
        "virtual_cells": len(cells),
        "leakage": isolation.leakage,
    }
    return output


def _usable_antennas(post_reports) -> set:
    return {a for report in post_reports.values() for a in report.usable_antenna_ids}


def _positions(scenario, learning) -> pd.DataFrame:
    rows = []
    for ut_id in sorted(learning.serving_sets):
        true_xy = scenario.ut_positions[ut_id]
        try:
            est = locate_from_dbm(scenario, learning.dbms, ut_id)
        except DbmError as exc:
            logger.debug(f"Not positioned: {exc.message}", extra={"ut_id": ut_id})
            continue
        rows.append((ut_id, true_xy[0], true_xy[1], est[0], est[1], float(np.hypot(*(est - true_xy)))))
    return pd.DataFrame(rows, columns=POSITION_COLUMNS)


@click.command("dbm")
@common_options("dbm.csv")
@click.option("--no-locate", is_flag=True, help="Skip DBM positioning of UTs")
def dbm_command(config_path: str, out: str, seed, no_locate: bool):
    """Learn DBMs, form virtual cells and write the isolation report."""
    config = load_run_config(config_path, seed)
    options = {"out": out, "locate": not no_locate}
    commit_run("dbm", config, options, run_dbm(config, Path(out), locate=not no_locate))
