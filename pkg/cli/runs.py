# smmimo_sim/cli/runs.py
"""
Shared subcommand plumbing: common options, config resolution and
committing rendered outputs together with their manifest.
"""

import functools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click

from core.artifacts import RunManifest, commit_outputs
from core.exceptions import ConfigValidationError, MissingSeed
from core.logger import get_logger
from core.validators import U64_MAX
from sim_tools.topology.config import ScenarioConfig, load_config, validate_config

logger = get_logger("cli.runs")


@dataclass
class RunOutput:
    """Rendered artifacts of one run; nothing is on disk yet."""
    primary: Path
    staged: Dict[Path, str] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)


def common_options(default_out: str) -> Callable:
    """--config, --out and --seed, shared by every pipeline subcommand."""
    def decorate(fn: Callable) -> Callable:
        @click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                      help="Scenario config JSON")
        @click.option("--out", default=default_out, show_default=True, type=click.Path(dir_okay=False),
                      help="Primary CSV output")
        @click.option("--seed", type=click.IntRange(0, U64_MAX), default=None,
                      help="Seed (overrides the config seed)")
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            return fn(*args, **kwargs)
        return wrapper
    return decorate


def resolve_config(config: ScenarioConfig, seed: Optional[int] = None) -> ScenarioConfig:
    """
    Apply a --seed override and check every invariant.

    Raises:
        ConfigValidationError: With the full validation report
        MissingSeed: If neither the config nor --seed gives a seed
    """
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    issues = validate_config(config)
    if issues:
        raise ConfigValidationError(issues)
    if config.seed is None:
        raise MissingSeed()
    return config


def load_run_config(config_path: str, seed: Optional[int]) -> ScenarioConfig:
    return resolve_config(load_config(config_path), seed)


def commit_run(subcommand: str, config: ScenarioConfig, options: Dict[str, Any], output: RunOutput) -> List[Path]:
    """Write every staged artifact atomically, then the run manifest."""
    manifest = RunManifest(
        subcommand=subcommand,
        config=config.model_dump(mode="json"),
        seed=config.seed,
        options=options,
        results=output.results,
    )
    written = commit_outputs(output.staged, manifest, output.primary)
    logger.info(f"Wrote {len(written)} file(s)", extra={"subcommand": subcommand, "seed": config.seed})
    return written
