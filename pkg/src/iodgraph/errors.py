"""Exception hierarchy shared by every module.

Each exception carries an ``exit_code`` so the command-line layer can map
failures onto its exit-status contract without a lookup table.
"""

from __future__ import annotations


class IODGraphError(Exception):
    """Base class for all library errors."""

    exit_code = 1
    kind = "error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class InvalidGraphError(IODGraphError, ValueError):
    """Raised when an operation needs a valid IOD graph and did not get one."""

    exit_code = 2
    kind = "invalid_graph"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations) or "invalid graph")

    def to_json(self) -> dict:
        out = super().to_json()
        out["violations"] = [v.to_json() for v in self.violations]
        return out


class UnknownNodeError(IODGraphError, KeyError):
    exit_code = 2
    kind = "unknown_node"

    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"unknown node(s): {', '.join(self.names)}")

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


class PartitionError(IODGraphError, ValueError):
    exit_code = 2
    kind = "invalid_partition"


class IncompatibleError(IODGraphError, ValueError):
    """Partitions fail crossover compatibility, or a membrane does not fit them."""

    exit_code = 3
    kind = "incompatible"


class InfeasibleMatchingError(IncompatibleError):
    kind = "infeasible_matching"


class BudgetExceededError(IODGraphError):
    exit_code = 4
    kind = "budget_exceeded"


class GraphFormatError(IODGraphError, ValueError):
    """Malformed serialized graph; ``line``/``column`` are 1-based when known."""

    exit_code = 2
    kind = "malformed_graph"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)

    def to_json(self) -> dict:
        out = super().to_json()
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out
