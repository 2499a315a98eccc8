# smmimo_sim/core/logger.py
"""
Logging for the SMMIMO simulator.

Every logger writes to stderr, since stdout is never part of a run's
output. Records render either as one structured text line or as one
JSON object (LOG_JSON=true); a copy goes to LOG_DIR when that is set.
Context travels through `extra` and only whitelisted keys are printed.
"""

import json
import logging
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from core.config import settings

LOG_FILE_NAME = "smmimo_sim.log"

EXTRA_KEYS = (
    "pn_id", "ut_id", "vn_id", "seed", "trials", "alpha", "snr_db",
    "duration", "component", "round", "subcommand",
)


def _context(record: logging.LogRecord) -> Dict[str, Any]:
    return {key: getattr(record, key) for key in EXTRA_KEYS if hasattr(record, key)}


def _short_name(name: str) -> str:
    """'sim_tools.capacity.montecarlo' -> 'capacity.montecarlo'"""
    return ".".join(name.split(".")[-2:])


class StructuredFormatter(logging.Formatter):
    """
    [TIMESTAMP] [LEVEL] [MODULE] message | key=value | ...

    Example:
        [2025-01-09 10:30:45] [INFO    ] [capacity.montecarlo] Sweep finished | trials=200
    """

    def format(self, record: logging.LogRecord) -> str:
        stamp = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
        line = f"[{stamp}] [{record.levelname:8}] [{_short_name(record.name)}] {record.getMessage()}"
        line += "".join(f" | {k}={v}" for k, v in _context(record).items())
        if record.exc_info:
            line += "\n" + self.formatException(record.exc_info)
        return line


class JSONFormatter(logging.Formatter):
    """One JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "module": record.name,
            "message": record.getMessage(),
            "line": record.lineno,
            **_context(record),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def configure_logger(
    name: str,
    level: str = "INFO",
    log_dir: str = "",
    use_json: bool = False,
) -> logging.Logger:
    """
    Attach the stderr handler (and the optional file handler) to a logger.

    Calling it again replaces the handlers instead of stacking them.

    Example:
        >>> logger = configure_logger("bootstrap.routing", level="DEBUG")
        >>> logger.info("Exchange converged", extra={"round": 3})
    """
    logger = logging.getLogger(name)
    logger.setLevel(level.upper())
    logger.handlers.clear()
    logger.propagate = False

    formatter = JSONFormatter() if use_json else StructuredFormatter()
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(Path(log_dir) / LOG_FILE_NAME, encoding="utf-8"))
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Logger configured from settings on first use.

    Example:
        >>> from core.logger import get_logger
        >>> logger = get_logger("dbm.pilot")
        >>> logger.info("Pilot survey finished", extra={"ut_id": 4})
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger
    return configure_logger(name, settings.LOG_LEVEL, settings.LOG_DIR, settings.LOG_JSON)


# ============================================================
# Monte Carlo work tracking
# ============================================================

@dataclass
class TrialUsage:
    trials: int = 0
    seconds: float = 0.0

    @property
    def trials_per_second(self) -> float:
        return self.trials / self.seconds if self.seconds > 0 else float("inf")


class TrialUsageLogger:
    """Accumulates channel realizations evaluated and the wall time spent on them."""

    def __init__(self, logger_name: str = "usage.trials"):
        self.logger = get_logger(logger_name)
        self.usage = TrialUsage()

    def _add(self, trials: int, duration: float) -> TrialUsage:
        self.usage.trials += trials
        self.usage.seconds += duration
        return TrialUsage(trials, duration)

    def log_point(
        self,
        snr_db: float,
        alpha: float,
        trials: int,
        duration: float,
        component: Optional[str] = None,
    ) -> TrialUsage:
        """
        Record one (SNR, alpha) grid cell.

        Args:
            snr_db: SNR of the cell in dB
            alpha: Interference factor of the cell
            trials: Channel realizations averaged
            duration: Wall time in seconds
            component: Caller tag, e.g. "capacity.ergodic"
        """
        point = self._add(trials, duration)
        extra: Dict[str, Any] = {"snr_db": snr_db, "alpha": alpha, "trials": trials, "duration": f"{duration:.3f}s"}
        if component:
            extra["component"] = component
        self.logger.debug(f"Capacity point: {point.trials_per_second:,.0f} trials/s", extra=extra)
        return point

    def log_sweep(self, cells: int, trials: int, duration: float) -> TrialUsage:
        """Record a finished sweep; every grid cell reuses the same trials."""
        sweep = self._add(trials, duration)
        self.logger.info(f"Sweep finished: {cells} grid cells", extra={"trials": trials, "duration": f"{duration:.3f}s"})
        return sweep


trial_logger = TrialUsageLogger()
