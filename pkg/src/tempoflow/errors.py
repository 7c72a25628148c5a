"""
Exception hierarchy for tempoflow.

Every error carries a stable machine-readable ``code`` and the CLI
``exit_code`` of its category:

- 1: invalid input (network file, parameters, cut functions)
- 2: an oracle-scale build did not fit its budget
- 3: an internal self-check failed (these indicate a bug, not bad input)
"""

from typing import Optional


class TempoflowError(Exception):
    """Base class for all tempoflow errors."""

    code = "tempoflow_error"
    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON error output."""
        result = {"code": self.code, "message": self.message}
        if self.field:
            result["field"] = self.field
        return result


# ============================================================================
# Input validation (exit 1)
# ============================================================================


class NetworkValidationError(TempoflowError):
    code = "invalid_network"


class NetworkFormatError(NetworkValidationError):
    code = "network_format"


class DuplicateEdge(NetworkValidationError):
    code = "duplicate_edge"


class SelfLoop(NetworkValidationError):
    code = "self_loop"


class SourceEqualsSink(NetworkValidationError):
    code = "source_equals_sink"


class UnknownNode(NetworkValidationError):
    code = "unknown_node"


class NegativeValue(NetworkValidationError):
    code = "negative_value"


class MalformedPieces(NetworkValidationError):
    code = "malformed_pieces"


class ArithmeticOverflow(TempoflowError):
    code = "arithmetic_overflow"


class InvalidIntervalSet(TempoflowError):
    code = "invalid_interval_set"


class TooManyDistinctLengths(TempoflowError):
    code = "too_many_distinct_lengths"


class LengthsNotCovered(TempoflowError):
    """Some edge length is missing from the length set passed in."""

    code = "lengths_not_covered"


class InfeasibleParameters(TempoflowError):
    code = "infeasible_parameters"


class UsageError(TempoflowError):
    """Bad command-line arguments."""

    code = "usage"


class InvalidCutFunction(TempoflowError):
    code = "invalid_cut_function"


class NodeNotInC(TempoflowError):
    code = "node_not_in_c"


class ShiftOutOfRange(TempoflowError):
    code = "shift_out_of_range"


# ============================================================================
# Budgets (exit 2)
# ============================================================================


class BudgetExceeded(TempoflowError):
    code = "budget_exceeded"
    exit_code = 2


# ============================================================================
# Self-checks (exit 3)
# ============================================================================


class FlowViolation(TempoflowError):
    """A flow over time breaks a capacity, holding or conservation constraint."""

    code = "flow_violation"
    exit_code = 3


class CapacityViolated(FlowViolation):
    code = "capacity_violated"

    def __init__(self, edge: tuple, t: int, message: Optional[str] = None):
        super().__init__(message or f"flow on {edge[0]}->{edge[1]} exceeds capacity at t={t}")
        self.edge = edge
        self.t = t


class NegativeHolding(FlowViolation):
    code = "negative_holding"

    def __init__(self, node: str, t: int):
        super().__init__(f"node {node} ships more than it has received at t={t}")
        self.node = node
        self.t = t


class NonZeroNetFlow(FlowViolation):
    code = "non_zero_net_flow"

    def __init__(self, node: str, net: int):
        super().__init__(f"node {node} keeps net flow {net} at the horizon")
        self.node = node
        self.net = net


class InvariantViolation(TempoflowError):
    code = "invariant_violation"
    exit_code = 3


class DualityViolation(InvariantViolation):
    code = "duality_violation"


class CostIncreased(InvariantViolation):
    code = "cost_increased"


class NotAMinCut(InvariantViolation):
    code = "not_a_min_cut"


class BoundViolation(InvariantViolation):
    code = "bound_violation"


class NotMonotone(InvariantViolation):
    code = "not_monotone"
