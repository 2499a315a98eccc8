# smmimo_sim/cli/main.py
"""
Command-line entry point.

Subcommands: init, dbm, capacity, offload, squ, replay. Data goes to
files only; reports and errors go to stderr.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import click
from pydantic import ValidationError

from cli.runs import RunOutput, commit_run, resolve_config
from core.artifacts import read_manifest
from core.config import settings
from core.exceptions import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    ConfigFileNotFound,
    ConfigValidationError,
    SmmimoError,
    exception_to_exit_code,
)
from core.logger import get_logger
from sim_tools.accounting.commands import run_squ, squ_command
from sim_tools.bootstrap.commands import init_command, run_init
from sim_tools.capacity.commands import capacity_command, run_capacity
from sim_tools.dbm.commands import dbm_command, run_dbm
from sim_tools.topology.config import ScenarioConfig
from sim_tools.vnode.commands import offload_command, run_offload

logger = get_logger("cli.main")

# subcommand -> runner(config, out, **manifest options)
RUNNERS: Dict[str, Callable[..., RunOutput]] = {
    "init": run_init,
    "dbm": run_dbm,
    "capacity": run_capacity,
    "offload": run_offload,
    "squ": run_squ,
}


@click.group()
@click.version_option(settings.TOOL_VERSION, prog_name=settings.APP_NAME)
def cli():
    """Smart Massive MIMO network simulator."""


@cli.command("replay")
@click.option("--manifest", "manifest_file", required=True, type=click.Path(dir_okay=False),
              help="RunManifest JSON written next to an earlier output")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Primary output (default: the original)")
@click.option("--threads", type=click.IntRange(1), default=None, help="capacity only")
def replay_command(manifest_file: str, out: Optional[str], threads: Optional[int]):
    """Re-run a subcommand from its manifest."""
    if not Path(manifest_file).is_file():
        raise ConfigFileNotFound(manifest_file)
    try:
        manifest = read_manifest(manifest_file)
        scenario_config = ScenarioConfig.model_validate(manifest.config)
    except ValidationError as exc:
        raise ConfigValidationError([str(err["msg"]) for err in exc.errors()], path=manifest_file) from exc
    if manifest.subcommand not in RUNNERS:
        raise ConfigValidationError([f"unknown subcommand in manifest: {manifest.subcommand}"], path=manifest_file)

    config = resolve_config(scenario_config, manifest.seed)
    options = dict(manifest.options)
    options["out"] = out or options.get("out")
    kwargs = {k: v for k, v in options.items() if k != "out"}
    if manifest.subcommand == "capacity":
        kwargs["threads"] = threads or settings.DEFAULT_THREADS

    logger.info(f"Replaying {manifest.subcommand}", extra={"subcommand": manifest.subcommand, "seed": config.seed})
    output = RUNNERS[manifest.subcommand](config, Path(options["out"]), **kwargs)
    commit_run(manifest.subcommand, config, options, output)


for command in (init_command, dbm_command, capacity_command, offload_command, squ_command):
    cli.add_command(command)


def _report(exc: SmmimoError) -> None:
    logger.error(f"{exc.error_code}: {exc.message}")
    for issue in exc.details.get("issues", []):
        click.echo(f"  - {issue}", err=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI and return its exit code instead of exiting.

    Example:
        >>> main(["capacity", "--config", "scenario.json", "--out", "cap.csv"])
        0
    """
    try:
        cli.main(args=argv, prog_name="smmimo", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_RUNTIME_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG_ERROR
    except SmmimoError as exc:
        _report(exc)
        return exception_to_exit_code(exc)
    except Exception as exc:
        logger.exception(f"Unexpected failure: {exc}")
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
