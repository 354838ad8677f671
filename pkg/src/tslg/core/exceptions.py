"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes (``cli/exceptions.py``).
"""

from __future__ import annotations

from typing import Any


class TslgError(Exception):
    """Base class for all domain errors."""


# ---------------------------------------------------------------------------
# Input and configuration
# ---------------------------------------------------------------------------


class ConfigurationError(TslgError):
    """Invalid constants, bounds or model identifiers."""


class DomainError(TslgError, ValueError):
    """Argument outside the domain of an operation."""


class EmptyInputError(TslgError, ValueError):
    """An operation received no data to work on."""


class LibraryMismatchError(TslgError):
    """A library file does not belong to the requested case."""


# ---------------------------------------------------------------------------
# Extraction and libraries
# ---------------------------------------------------------------------------


class ExtractionError(TslgError):
    """No cell of the exposure model exceeds the common-set threshold."""


class EmptyLibraryError(TslgError):
    """The library holds no critical scenario."""


class ZeroPosteriorError(TslgError):
    """Posterior requested where the surrogate never reaches an accident."""


# ---------------------------------------------------------------------------
# Algorithms
# ---------------------------------------------------------------------------


class ConvergenceError(TslgError):
    """Iterative training stopped at its cap before converging."""

    def __init__(self, message: str, **diagnostics: Any) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


class CyclicGraphError(TslgError):
    """States that can never reach a terminal state."""


class OracleRefusedError(TslgError):
    """The exhaustive oracle declined a space above its cell cap."""
