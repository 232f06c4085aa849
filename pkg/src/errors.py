"""Exception hierarchy; every error carries the CLI exit code it maps to."""
from typing import Any, Dict, List, Optional, Tuple


class LensKitError(Exception):
    """Base error for the toolkit."""
    exit_code: int = 1

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly description used by the CLI error channel."""
        return {"error": type(self).__name__, "message": str(self)}


class InvalidInputError(LensKitError, ValueError):
    """Input violates an operation's precondition."""
    exit_code = 2


class FamilyValidationError(InvalidInputError):
    """Some pair of circles is not intersecting (or is identical)."""

    def __init__(self, violations: List[Tuple[int, int, Any]]):
        self.violations = violations
        summary = ", ".join(f"({i}, {j}): {rel.value}" for i, j, rel in violations[:5])
        more = "" if len(violations) <= 5 else f" and {len(violations) - 5} more"
        super().__init__(f"not a pairwise intersecting family: {summary}{more}")

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out["violations"] = [
            {"i": i, "j": j, "relation": rel.value} for i, j, rel in self.violations
        ]
        return out


class NoIncidenceError(InvalidInputError):
    """Inflation cannot reach any intersection point of the other circles."""


class BudgetExhaustedError(LensKitError):
    """A randomized procedure ran out of retries."""
    exit_code = 2


class DegenerateInputError(LensKitError):
    """Float mode cannot resolve the input; callers should use the exact census."""
    exit_code = 2


class FalsificationError(LensKitError):
    """A checked theorem failed on a concrete input (almost surely a bug)."""
    exit_code = 3

    def __init__(self, theorem: str, message: str, witness: Optional[Dict[str, Any]] = None):
        self.theorem = theorem
        self.witness = witness or {}
        super().__init__(f"[{theorem}] {message}")

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out["theorem"] = self.theorem
        out["witness"] = self.witness
        return out


class InternalConsistencyError(LensKitError):
    """Two engines or two bookkeeping paths disagree."""
    exit_code = 4

    def __init__(self, message: str, dump: Optional[Dict[str, Any]] = None):
        self.dump = dump or {}
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out["dump"] = self.dump
        return out
