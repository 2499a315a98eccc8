# smmimo_sim/core/artifacts.py
"""
Output artifacts: atomic CSV/text writes and the run manifest.

No output path ever holds a partial file: content is written to a
temporary file in the same directory and renamed over the target.
"""

import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from core.config import settings
from core.logger import get_logger

logger = get_logger("core.artifacts")


class RunManifest(BaseModel):
    """Everything needed to reproduce one subcommand run."""
    subcommand: str
    config: Dict[str, Any]
    seed: int
    options: Dict[str, Any] = Field(default_factory=dict)
    artifacts: List[str] = Field(default_factory=list)
    results: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str = settings.TOOL_VERSION


def _write_temporary(target: Path, text: str) -> str:
    """Write text to a temporary sibling of target and return its name."""
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except BaseException:
        _discard([tmp_name])
        raise
    return tmp_name


def _discard(tmp_names: List[str]) -> None:
    for tmp_name in tmp_names:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)


def frame_to_csv_text(frame: pd.DataFrame) -> str:
    """CSV text with header row, '.' decimal separator and '\\n' line endings."""
    return frame.to_csv(index=False, lineterminator="\n")


def sibling_path(out: str | Path, suffix: str) -> Path:
    """
    Derive a companion artifact path from the primary output.

    Example:
        >>> str(sibling_path("runs/dbm.csv", "cells"))
        'runs/dbm_cells.csv'
    """
    out = Path(out)
    return out.with_name(f"{out.stem}_{suffix}{out.suffix or '.csv'}")


def manifest_path(out: str | Path) -> Path:
    """Manifest path written next to the primary output."""
    out = Path(out)
    return out.with_name(f"{out.stem}.manifest.json")


def read_manifest(path: str | Path) -> RunManifest:
    """Load a manifest written by commit_outputs."""
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))


def commit_outputs(staged: Dict[Path, str], manifest: Optional[RunManifest] = None,
                   primary: Optional[Path] = None) -> List[Path]:
    """
    Write a batch of already-rendered artifacts, manifest last.

    Every file is first written to a temporary sibling; targets are only
    renamed into place once all of them were written, so a failure while
    writing leaves none of the batch behind.
    """
    batch = [(Path(path), text) for path, text in staged.items()]
    if manifest is not None and primary is not None:
        manifest.artifacts = [str(path) for path, _ in batch]
        batch.append((manifest_path(primary), manifest.model_dump_json(indent=2) + "\n"))

    pending: List[str] = []
    try:
        for target, text in batch:
            pending.append(_write_temporary(target, text))
    except BaseException:
        _discard(pending)
        raise

    written = []
    for (target, _), tmp_name in zip(batch, pending):
        os.replace(tmp_name, target)
        written.append(target)
    logger.debug(f"Committed {len(written)} file(s)")
    return written
