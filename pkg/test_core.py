# smmimo_sim/test_core.py
"""
Logging, artifact writing and exit-code mapping
"""
import json

import pandas as pd
import pytest

from core.artifacts import (
    RunManifest,
    commit_outputs,
    frame_to_csv_text,
    manifest_path,
    read_manifest,
    sibling_path,
)
from core.exceptions import (
    EXIT_CONFIG_ERROR,
    EXIT_RUNTIME_ERROR,
    MissingSeed,
    NoRoute,
    SmmimoError,
    exception_to_exit_code,
)
from core.logger import TrialUsageLogger, configure_logger


# ============================================================
# Logging
# ============================================================

def test_json_lines_keep_whitelisted_context(capsys):
    logger = configure_logger("test.core.json", use_json=True)
    logger.info("PN booted", extra={"pn_id": 3, "payload": "dropped"})
    record = json.loads(capsys.readouterr().err.strip())
    assert record["message"] == "PN booted"
    assert record["pn_id"] == 3
    assert "payload" not in record


def test_structured_line_goes_to_stderr(capsys):
    logger = configure_logger("sim_tools.test.structured")
    logger.warning("Orphaned UT", extra={"ut_id": 7})
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "[test.structured] Orphaned UT | ut_id=7" in captured.err


def test_log_dir_adds_file_copy(tmp_path):
    logger = configure_logger("test.core.file", log_dir=str(tmp_path / "logs"))
    logger.info("to file")
    for handler in logger.handlers:
        handler.flush()
    assert "to file" in (tmp_path / "logs" / "smmimo_sim.log").read_text()


def test_trial_usage_accumulates():
    usage = TrialUsageLogger("test.core.usage")
    usage.log_point(10.0, 0.5, 20, 0.5)
    usage.log_sweep(4, 20, 1.5)
    assert usage.usage.trials == 40
    assert usage.usage.seconds == 2.0


# ============================================================
# Artifacts
# ============================================================

def test_commit_leaves_no_temporaries(tmp_path):
    [target] = commit_outputs({tmp_path / "deep" / "a.csv": "x\n1\n"})
    assert target.read_text() == "x\n1\n"
    assert [p.name for p in target.parent.iterdir()] == ["a.csv"]


def test_csv_text_format():
    text = frame_to_csv_text(pd.DataFrame({"a": [1, 2], "b": [0.5, 1.25]}))
    assert text == "a,b\n1,0.5\n2,1.25\n"


def test_companion_paths():
    assert sibling_path("runs/dbm.csv", "cells").name == "dbm_cells.csv"
    assert manifest_path("runs/dbm.csv").name == "dbm.manifest.json"


def test_commit_outputs_writes_manifest_last(tmp_path):
    primary = tmp_path / "run.csv"
    staged = {primary: "a\n1\n", sibling_path(primary, "extra"): "b\n2\n"}
    manifest = RunManifest(subcommand="init", config={"seed": 1}, seed=1)
    written = commit_outputs(staged, manifest, primary)
    assert written[-1] == manifest_path(primary)
    loaded = read_manifest(written[-1])
    assert loaded.artifacts == [str(primary), str(sibling_path(primary, "extra"))]
    assert loaded.seed == 1


def test_failed_batch_writes_nothing(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    primary = tmp_path / "run.csv"
    staged = {primary: "a\n1\n", blocker / "extra.csv": "b\n2\n"}
    manifest = RunManifest(subcommand="init", config={"seed": 1}, seed=1)
    with pytest.raises(OSError):
        commit_outputs(staged, manifest, primary)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["blocker"]


# ============================================================
# Exit codes
# ============================================================

def test_exit_codes_follow_hierarchy():
    assert exception_to_exit_code(MissingSeed()) == EXIT_CONFIG_ERROR
    assert exception_to_exit_code(NoRoute(1, "no gateway")) == EXIT_RUNTIME_ERROR
    assert exception_to_exit_code(SmmimoError("boom")) == EXIT_RUNTIME_ERROR
    assert exception_to_exit_code(ValueError()) == EXIT_RUNTIME_ERROR
