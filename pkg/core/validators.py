# smmimo_sim/core/validators.py
"""
Range checks shared by configuration and accounting inputs.

Every checker appends a human-readable issue to a report list instead of
raising, so callers can collect all violations in one pass.
"""

import math
from typing import Iterable, List, Optional

U64_MAX = 2 ** 64 - 1


# ============================================================
# Scalar checks
# ============================================================

def check_finite(report: List[str], name: str, value: float) -> bool:
    """Report NaN/Inf values."""
    if not math.isfinite(value):
        report.append(f"{name} must be finite (got {value})")
        return False
    return True


def check_min(report: List[str], name: str, value: float, minimum: float) -> bool:
    """Report values below an inclusive minimum."""
    if not check_finite(report, name, value):
        return False
    if value < minimum:
        report.append(f"{name} must be >= {minimum} (got {value})")
        return False
    return True


def check_positive(report: List[str], name: str, value: float) -> bool:
    """Report values that are not strictly positive."""
    if not check_finite(report, name, value):
        return False
    if value <= 0:
        report.append(f"{name} must be > 0 (got {value})")
        return False
    return True


def check_half_open_unit(report: List[str], name: str, value: float) -> bool:
    """
    Report values outside (0, 1].

    Example:
        >>> issues = []
        >>> check_half_open_unit(issues, "mu", 0.0)
        False
        >>> issues
        ['mu out of (0,1] (got 0.0)']
    """
    if not math.isfinite(value) or not 0.0 < value <= 1.0:
        report.append(f"{name} out of (0,1] (got {value})")
        return False
    return True


def check_closed_unit(report: List[str], name: str, value: float) -> bool:
    """Report values outside [0, 1]."""
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        report.append(f"{name} out of [0,1] (got {value})")
        return False
    return True


def check_u64(report: List[str], name: str, value: Optional[int]) -> bool:
    """Report integers outside the unsigned 64-bit range (None passes)."""
    if value is None:
        return True
    if not 0 <= value <= U64_MAX:
        report.append(f"{name} out of 64-bit unsigned range (got {value})")
        return False
    return True


# ============================================================
# Collection checks
# ============================================================

def check_nonempty(report: List[str], name: str, values: Iterable) -> bool:
    """Report empty sequences."""
    if not list(values):
        report.append(f"{name} must not be empty")
        return False
    return True
