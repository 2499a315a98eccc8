# smmimo_sim/core/exceptions.py
"""
Custom exception classes for the SMMIMO simulator.

Provides a structured exception hierarchy so every failure carries a
machine-readable code and details, and so the CLI can map failures to
exit codes in one place.
"""

from typing import Optional, Dict, Any, Iterable, List


EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


class SmmimoError(Exception):
    """
    Base exception class for all simulator errors.

    All custom exceptions should inherit from this class.
    """

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        """
        Initialize custom exception.

        Args:
            message: Human-readable error message
            error_code: Machine-readable error code (e.g., "NO_COVERAGE")
            details: Additional error details for debugging
        """
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for reports and manifests"""
        return {
            "error": self.error_code,
            "message": self.message,
            "details": self.details
        }


# ============================================================
# Configuration Exceptions
# ============================================================

class ConfigError(SmmimoError):
    """Base class for configuration errors (exit code 1)"""
    pass


class ConfigValidationError(ConfigError):
    """Scenario configuration violates one or more invariants"""

    def __init__(self, issues: Iterable[str], **kwargs):
        issues = list(issues)
        message = f"Invalid configuration: {len(issues)} issue(s)"
        details: Dict[str, Any] = {"issues": issues}
        details.update(kwargs)
        super().__init__(message, "CONFIG_VALIDATION_ERROR", details)

    @property
    def issues(self) -> List[str]:
        return self.details["issues"]


class ConfigFileNotFound(ConfigError):
    """Configuration file does not exist"""

    def __init__(self, path: str, **kwargs):
        details = {"path": path}
        details.update(kwargs)
        super().__init__(f"Config file not found: {path}", "CONFIG_NOT_FOUND", details)


class MissingSeed(ConfigError):
    """Neither the config nor the command line provides a seed"""

    def __init__(self, **kwargs):
        super().__init__(
            "No seed given: set 'seed' in the config or pass --seed",
            "MISSING_SEED",
            kwargs
        )


# ============================================================
# Bootstrap Exceptions
# ============================================================

class BootstrapError(SmmimoError):
    """Base class for PN initialization and self-assembly errors"""
    pass


class AllBlocksFailed(BootstrapError):
    """Every CCM block of a PN failed POST; the PN cannot boot"""

    def __init__(self, pn_id: int, **kwargs):
        details = {"pn_id": pn_id}
        details.update(kwargs)
        super().__init__(f"PN {pn_id}: all CCM blocks failed POST", "ALL_BLOCKS_FAILED", details)


class InvalidFaultSet(BootstrapError):
    """Fault injection names blocks the PN does not have"""

    def __init__(self, pn_id: int, unknown_blocks: Iterable[int], **kwargs):
        unknown = sorted(unknown_blocks)
        details = {"pn_id": pn_id, "unknown_blocks": unknown}
        details.update(kwargs)
        super().__init__(f"PN {pn_id}: unknown block ids {unknown}", "INVALID_FAULT_SET", details)


class StageViolation(BootstrapError):
    """Operation requires a later boot stage than the PN has reached"""

    def __init__(self, pn_id: int, stage: str, required: str, **kwargs):
        details = {"pn_id": pn_id, "stage": stage, "required": required}
        details.update(kwargs)
        super().__init__(
            f"PN {pn_id} is at {stage}, operation requires {required}",
            "STAGE_VIOLATION",
            details
        )


class MessageClassMismatch(BootstrapError):
    """Control message kind does not belong to the declared class"""

    def __init__(self, kind: str, msg_class: str, **kwargs):
        details = {"kind": kind, "class": msg_class}
        details.update(kwargs)
        super().__init__(f"{kind} messages cannot be {msg_class}", "MESSAGE_CLASS_MISMATCH", details)


class NonConvergence(BootstrapError):
    """Neighbor map exchange exceeded its round bound"""

    def __init__(self, rounds: int, pn_count: int, **kwargs):
        details = {"rounds": rounds, "pn_count": pn_count}
        details.update(kwargs)
        super().__init__(
            f"Map exchange did not converge within {pn_count} rounds",
            "NON_CONVERGENCE",
            details
        )


class UnknownPn(BootstrapError):
    """PN id is not part of the connection map set"""

    def __init__(self, pn_id: int, **kwargs):
        details = {"pn_id": pn_id}
        details.update(kwargs)
        super().__init__(f"PN not found: {pn_id}", "UNKNOWN_PN", details)


# ============================================================
# Delay Based Map Exceptions
# ============================================================

class DbmError(SmmimoError):
    """Base class for pilot, DBM and positioning errors"""
    pass


class NoCoverage(DbmError):
    """No antenna receives the UT pilot above the noise floor"""

    def __init__(self, ut_id: int, **kwargs):
        details = {"ut_id": ut_id}
        details.update(kwargs)
        super().__init__(f"UT {ut_id}: no antenna above the noise floor", "NO_COVERAGE", details)


class EmptyServingSet(DbmError):
    """A UT reached cell formation without serving antennas"""

    def __init__(self, ut_id: int, **kwargs):
        details = {"ut_id": ut_id}
        details.update(kwargs)
        super().__init__(f"UT {ut_id} has an empty serving set", "EMPTY_SERVING_SET", details)


class InsufficientAnchors(DbmError):
    """Multilateration needs at least three anchors"""

    def __init__(self, count: int, **kwargs):
        details = {"anchors": count, "required": 3}
        details.update(kwargs)
        super().__init__(f"Need at least 3 anchors, got {count}", "INSUFFICIENT_ANCHORS", details)


class DegenerateGeometry(DbmError):
    """Anchors are collinear (or coincident)"""

    def __init__(self, singular_values: Iterable[float], **kwargs):
        details = {"singular_values": [float(s) for s in singular_values]}
        details.update(kwargs)
        super().__init__("Anchor geometry is degenerate (collinear)", "DEGENERATE_GEOMETRY", details)


# ============================================================
# Virtualization Exceptions
# ============================================================

class VirtualizationError(SmmimoError):
    """Base class for VN, VMU, link and traffic errors"""
    pass


class InsufficientResources(VirtualizationError):
    """Resource pool cannot satisfy a VN request"""

    def __init__(self, resource_class: str, requested: int, available: int, **kwargs):
        details = {"resource_class": resource_class, "requested": requested, "available": available}
        details.update(kwargs)
        super().__init__(
            f"Insufficient {resource_class}: requested {requested}, available {available}",
            "INSUFFICIENT_RESOURCES",
            details
        )


class UnknownResource(VirtualizationError):
    """Resource id has no VMU mapping"""

    def __init__(self, resource_id: Any, **kwargs):
        details = {"resource_id": str(resource_id)}
        details.update(kwargs)
        super().__init__(f"Resource not mapped: {resource_id}", "UNKNOWN_RESOURCE", details)


class AntennaBusy(VirtualizationError):
    """Antennas already serve another link"""

    def __init__(self, antenna_ids: Iterable[int], **kwargs):
        busy = sorted(antenna_ids)
        details = {"antenna_ids": busy}
        details.update(kwargs)
        super().__init__(f"Antennas already link-busy: {busy[:10]}", "ANTENNA_BUSY", details)


class ForeignAntenna(VirtualizationError):
    """Link endpoint names antennas outside the VN"""

    def __init__(self, vn_id: int, antenna_ids: Iterable[int], **kwargs):
        foreign = sorted(antenna_ids)
        details = {"vn_id": vn_id, "antenna_ids": foreign}
        details.update(kwargs)
        super().__init__(f"Antennas not owned by VN {vn_id}: {foreign[:10]}", "FOREIGN_ANTENNA", details)


class ForeignUt(VirtualizationError):
    """P2MP endpoint names UTs outside the VN's virtual cell"""

    def __init__(self, vn_id: int, ut_ids: Iterable[int], **kwargs):
        foreign = sorted(ut_ids)
        details = {"vn_id": vn_id, "ut_ids": foreign}
        details.update(kwargs)
        super().__init__(f"UTs outside the cell of VN {vn_id}: {foreign[:10]}", "FOREIGN_UT", details)


class InvalidLinkEndpoints(VirtualizationError):
    """Link endpoints are malformed for the requested kind"""

    def __init__(self, reason: str, **kwargs):
        details = {"reason": reason}
        details.update(kwargs)
        super().__init__(f"Invalid link endpoints: {reason}", "INVALID_LINK_ENDPOINTS", details)


class RoleConstraintViolated(VirtualizationError):
    """EPC role assignment breaks a role constraint"""

    def __init__(self, vn_id: int, constraint: str, **kwargs):
        details = {"vn_id": vn_id, "constraint": constraint}
        details.update(kwargs)
        super().__init__(f"VN {vn_id}: {constraint}", "ROLE_CONSTRAINT_VIOLATED", details)


class HierarchyCycle(VirtualizationError):
    """Parent assignment would create a cycle in the VN forest"""

    def __init__(self, vn_id: int, parent_vn: int, **kwargs):
        details = {"vn_id": vn_id, "parent_vn": parent_vn}
        details.update(kwargs)
        super().__init__(f"VN {vn_id} cannot have parent {parent_vn}", "HIERARCHY_CYCLE", details)


class PgwPlacementError(VirtualizationError):
    """PGW roles do not match the requested gateway mode"""

    def __init__(self, mode: str, vn_ids: Iterable[int], **kwargs):
        offending = sorted(vn_ids)
        details = {"mode": mode, "vn_ids": offending}
        details.update(kwargs)
        super().__init__(f"PGW placement inconsistent with {mode} mode at VNs {offending}", "PGW_PLACEMENT", details)


class NoRoute(VirtualizationError):
    """Flow destination is not reachable in the VN forest"""

    def __init__(self, flow_id: int, reason: str, **kwargs):
        details = {"flow_id": flow_id, "reason": reason}
        details.update(kwargs)
        super().__init__(f"No route for flow {flow_id}: {reason}", "NO_ROUTE", details)


# ============================================================
# Capacity Exceptions
# ============================================================

class CapacityError(SmmimoError):
    """Base class for channel and capacity errors"""
    pass


class CapacityInputError(CapacityError):
    """Capacity inputs are out of range"""

    def __init__(self, reason: str, **kwargs):
        details = {"reason": reason}
        details.update(kwargs)
        super().__init__(f"Invalid capacity input: {reason}", "CAPACITY_INPUT_ERROR", details)


class NumericalFailure(CapacityError):
    """Gram matrix factorization failed (NaN/Inf input)"""

    def __init__(self, reason: str, trial_index: Optional[int] = None, **kwargs):
        details: Dict[str, Any] = {"reason": reason}
        if trial_index is not None:
            details["trial_index"] = trial_index
        details.update(kwargs)
        where = f" (trial {trial_index})" if trial_index is not None else ""
        super().__init__(f"Numerical failure{where}: {reason}", "NUMERICAL_FAILURE", details)


class CalibrationError(CapacityError):
    """Target capacity is not reachable inside the alpha bracket"""

    def __init__(self, target: float, reason: str, **kwargs):
        details = {"target": target, "reason": reason}
        details.update(kwargs)
        super().__init__(f"Cannot calibrate alpha for {target} bps/Hz: {reason}", "CALIBRATION_ERROR", details)


# ============================================================
# Accounting Exceptions
# ============================================================

class AccountingError(SmmimoError):
    """Base class for SQU errors"""
    pass


class InvalidSquInput(AccountingError):
    """SQU vector or weights out of range"""

    def __init__(self, issues: Iterable[str], **kwargs):
        issues = list(issues)
        details: Dict[str, Any] = {"issues": issues}
        details.update(kwargs)
        super().__init__(f"Invalid SQU input: {'; '.join(issues)}", "INVALID_SQU_INPUT", details)


class UnroutedFlow(AccountingError):
    """Flow has no route in the traffic report"""

    def __init__(self, flow_id: int, **kwargs):
        details = {"flow_id": flow_id}
        details.update(kwargs)
        super().__init__(f"Flow {flow_id} was not routed", "UNROUTED_FLOW", details)


# ============================================================
# Exception to Exit Code Mapping
# ============================================================

EXCEPTION_EXIT_MAP = {
    ConfigError: EXIT_CONFIG_ERROR,

    # Default mappings
    BootstrapError: EXIT_RUNTIME_ERROR,
    DbmError: EXIT_RUNTIME_ERROR,
    VirtualizationError: EXIT_RUNTIME_ERROR,
    CapacityError: EXIT_RUNTIME_ERROR,
    AccountingError: EXIT_RUNTIME_ERROR,
    SmmimoError: EXIT_RUNTIME_ERROR,
}


def exception_to_exit_code(exc: BaseException) -> int:
    """
    Convert an exception to the CLI exit code.

    Args:
        exc: Raised exception

    Returns:
        Exit code of the closest mapped class in the exception's MRO
    """
    for klass in type(exc).__mro__:
        if klass in EXCEPTION_EXIT_MAP:
            return EXCEPTION_EXIT_MAP[klass]
    return EXIT_RUNTIME_ERROR
