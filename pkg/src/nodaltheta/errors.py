"""Exception types shared across the library.

Precondition violations carry a short machine-readable name so the CLI can
map them to exit status 2 with a diagnostic naming the violated check.
Verification failures (a theorem check that did not hold) map to exit 3.
"""

from __future__ import annotations


class PreconditionError(ValueError):
    """An operation was called on input that violates its contract."""

    def __init__(self, name: str, message: str):
        self.name = name
        super().__init__(f"{name}: {message}")


class VerificationError(AssertionError):
    """An internal cross-check failed: either a bug or a counterexample."""


class IndeterminateAtTruncation(Exception):
    """A family's determinant vanishes to the working truncation.

    The restriction is zero modulo t^(N+1): either increase N or the family
    lies inside the divisor being tested (the excluded case).
    """

    def __init__(self, truncation: int):
        self.truncation = truncation
        self.at_least = truncation + 1
        super().__init__(
            f"determinant vanishes modulo t^{truncation + 1}; "
            f"order is at least {truncation + 1}"
        )
