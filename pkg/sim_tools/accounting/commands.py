# smmimo_sim/sim_tools/accounting/commands.py
"""`squ` subcommand: price metric vectors from a CSV, or generated offload flows."""

from pathlib import Path
from typing import Dict, Optional

import click
import pandas as pd

from cli.runs import RunOutput, commit_run, common_options, load_run_config
from core.artifacts import frame_to_csv_text
from core.exceptions import ConfigFileNotFound, InvalidSquInput
from sim_tools.accounting.squ import SQU_COLUMNS, SQU_FIELDS, SquWeights, price_flow, price_vectors
from sim_tools.topology.config import ScenarioConfig
from sim_tools.vnode.commands import run_offload_experiment
from sim_tools.vnode.hierarchy import PgwMode


def _read_vectors(path: str) -> pd.DataFrame:
    if not Path(path).is_file():
        raise ConfigFileNotFound(path)
    try:
        return pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InvalidSquInput([f"unreadable vectors CSV: {exc}"], path=path) from exc


def run_squ(
    config: ScenarioConfig,
    out: Path,
    weights: Optional[Dict[str, float]] = None,
    vectors: Optional[str] = None,
    flows: int = 100,
    mode: str = "distributed",
    depth: int = 2,
    fanout: int = 2,
) -> RunOutput:
    squ_weights = SquWeights(**(weights or {}))

    if vectors is not None:
        priced = price_vectors(_read_vectors(vectors), squ_weights)
    else:
        experiment = run_offload_experiment(config, flows, None, depth, fanout)
        report = experiment.reports[PgwMode(mode)]
        priced = pd.DataFrame(
            [(flow.flow_id, price_flow(flow, report, squ_weights)) for flow in experiment.flows],
            columns=SQU_COLUMNS,
        )

    output = RunOutput(primary=out)
    output.staged[out] = frame_to_csv_text(priced)
    output.results = {"priced": len(priced), "total_squ": float(priced["cost_squ"].sum())}
    return output


def _weight_option(name: str):
    return click.option(
        f"--w-{name.replace('_', '-')}", name, type=click.FloatRange(min=0.0), default=1.0, show_default=True,
        help=f"Weight of {name}",
    )


@click.command("squ")
@common_options("squ.csv")
@_weight_option("data_urgency")
@_weight_option("energy_cost")
@_weight_option("distance_to_destination")
@_weight_option("signaling_cost")
@_weight_option("content_quality")
@click.option("--vectors", type=click.Path(dir_okay=False), default=None,
              help="CSV of flow_id plus the five metric columns")
@click.option("--flows", type=click.IntRange(0), default=100, show_default=True,
              help="Generated flows to price when --vectors is absent")
@click.option("--mode", type=click.Choice([m.value for m in PgwMode]), default="distributed", show_default=True)
@click.option("--depth", type=click.IntRange(0), default=2, show_default=True)
@click.option("--fanout", type=click.IntRange(1), default=2, show_default=True)
def squ_command(config_path: str, out: str, seed, vectors, flows, mode, depth, fanout, **weights):
    """Price flows in Service Quanta Units."""
    config = load_run_config(config_path, seed)
    weights = {name: weights[name] for name in SQU_FIELDS}
    options = {
        "out": out, "weights": weights, "vectors": vectors,
        "flows": flows, "mode": mode, "depth": depth, "fanout": fanout,
    }
    output = run_squ(config, Path(out), weights, vectors, flows, mode, depth, fanout)
    commit_run("squ", config, options, output)
