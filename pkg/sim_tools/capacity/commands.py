# smmimo_sim/sim_tools/capacity/commands.py
"""`capacity` subcommand: ergodic capacity sweep, optional SVG and alpha calibration."""

from pathlib import Path
from typing import Optional

import click

from cli.runs import RunOutput, commit_run, common_options, load_run_config
from core.artifacts import frame_to_csv_text
from core.config import settings
from sim_tools.capacity.chart import render_capacity_svg
from sim_tools.capacity.montecarlo import calibrate_alpha, sweep_curve, trial_grams
from sim_tools.topology.config import ScenarioConfig


def run_capacity(
    config: ScenarioConfig,
    out: Path,
    svg: Optional[str] = None,
    threads: int = 1,
    calibrate_target: Optional[float] = None,
    calibrate_snr: float = 10.0,
) -> RunOutput:
    """
    Sweep every (alpha, SNR) cell over one shared set of trial draws.

    threads only changes wall time: the CSV is identical for any value.
    """
    cache = trial_grams(config, config.seed, threads)
    curve = sweep_curve(config, cache=cache)

    output = RunOutput(primary=out)
    output.staged[out] = frame_to_csv_text(curve.to_frame())
    if svg:
        output.staged[Path(svg)] = render_capacity_svg(curve)
    output.results = {"M": cache.M, "K": cache.K, "k_interferers": config.interferers, "cells": len(curve.points)}

    if calibrate_target is not None:
        calibration = calibrate_alpha(cache, calibrate_target, calibrate_snr, config.interferers)
        output.results["calibration"] = {
            "alpha": calibration.alpha,
            "target": calibration.target,
            "snr_db": calibrate_snr,
            "capacity_bps_hz": calibration.point.mean_capacity,
            "std_error": calibration.point.std_error,
            "iterations": calibration.iterations,
        }
    return output


@click.command("capacity")
@common_options("capacity.csv")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="Also render an SVG chart")
@click.option("--threads", type=click.IntRange(1), default=None,
              help="Trial worker threads (never changes results)")
@click.option("--calibrate-target", type=float, default=None, help="Bisect alpha to hit this capacity (bps/Hz)")
@click.option("--calibrate-snr", type=float, default=10.0, show_default=True, help="SNR of the calibration point (dB)")
def capacity_command(config_path: str, out: str, seed, svg, threads, calibrate_target, calibrate_snr):
    """Monte Carlo ergodic capacity vs SNR for every alpha."""
    config = load_run_config(config_path, seed)
    threads = threads or settings.DEFAULT_THREADS
    options = {"out": out, "svg": svg, "calibrate_target": calibrate_target, "calibrate_snr": calibrate_snr}
    output = run_capacity(config, Path(out), svg, threads, calibrate_target, calibrate_snr)
    commit_run("capacity", config, options, output)
