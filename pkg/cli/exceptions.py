"""Exit codes of the ``tslg`` command."""

from tslg.core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    EmptyInputError,
    LibraryMismatchError,
    OracleRefusedError,
    TslgError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_ORACLE_REFUSED = 4

_USAGE_ERRORS = (
    ConfigurationError,
    DomainError,
    EmptyInputError,
    LibraryMismatchError,
    FileNotFoundError,
)


class ReplayMismatchError(TslgError):
    """A replayed command wrote outputs that differ from its manifest."""


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, _USAGE_ERRORS):
        return EXIT_USAGE
    if isinstance(exc, ConvergenceError):
        return EXIT_NOT_CONVERGED
    if isinstance(exc, OracleRefusedError):
        return EXIT_ORACLE_REFUSED
    return EXIT_FAILURE
