"""Check reports: verdict plus witness data for every decision procedure."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a decision procedure.

    `witness` holds the explicit counterexample (on failure) or the
    certifying data (on success) as JSON-friendly primitives.
    """

    check: str
    passed: bool
    witness: dict = field(default_factory=dict)
    details: str = ""

    def __bool__(self):
        return self.passed


def passing(check, witness=None, details=""):
    return CheckReport(check, True, witness or {}, details)


def failing(check, witness=None, details=""):
    return CheckReport(check, False, witness or {}, details)
