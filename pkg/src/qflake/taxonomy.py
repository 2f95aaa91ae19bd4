"""Root-cause taxonomy and fix-pattern vocabulary for flaky-test reports.

The nine root-cause classes and eight fix patterns are fixed vocabulary; parsing
is case-insensitive on the canonical names and everything else is rejected.
"""

from __future__ import annotations

from enum import Enum

FLAKY_TOKEN = "FLAKY"
NON_FLAKY_TOKEN = "NON-FLAKY"


class RootCauseClass(Enum):
    RANDOMNESS = "Randomness (PRNG)"
    FLOATING_POINT = "Floating Point Operations"
    SOFTWARE_ENV = "Software Environment"
    MULTI_THREADING = "Multi-threading"
    VISUALIZATION = "Visualization"
    UNHANDLED_EXCEPTIONS = "Unhandled Exceptions"
    NETWORK = "Network"
    UNORDERED_COLLECTION = "Unordered Collection"
    OTHERS = "Others"

    def __str__(self) -> str:
        return self.value


# "Unknown" is a valid dataset label (cause never established) but is not one of
# the nine classes a model may answer with, and is excluded from root-cause
# scoring by default.
UNKNOWN_CAUSE = "Unknown"

ROOT_CAUSE_NAMES: tuple[str, ...] = tuple(c.value for c in RootCauseClass)

_CANONICAL_BY_FOLDED = {c.value.casefold(): c for c in RootCauseClass}


def parse_root_cause(text: str) -> RootCauseClass | None:
    """Parse one canonical class name, case-insensitively. None if no match."""
    return _CANONICAL_BY_FOLDED.get(text.strip().casefold())


class FixPattern(Enum):
    FIX_SEED = "Fix Seed"
    ALTER_SOFTWARE_ENV = "Alter Software Env."
    MAKE_SINGLE_THREAD = "Make Single Thread"
    ADJUST_TOLERANCE = "Adjust Tolerance"
    ADD_EXCEPTION_HANDLER = "Add Exception Handler"
    SYNCHRONIZE = "Synchronize"
    USE_KEYS_FOR_ORDER = "Use Keys for Order"
    OTHERS = "Others"

    def __str__(self) -> str:
        return self.value


_FIX_BY_FOLDED = {f.value.casefold(): f for f in FixPattern}


def parse_fix_pattern(text: str) -> FixPattern | None:
    return _FIX_BY_FOLDED.get(text.strip().casefold())
