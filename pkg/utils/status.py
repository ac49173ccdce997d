"""
Status and exit code constants for the channel-estimation toolkit.

Responsibilities:
- Provides standard success and failure codes for library operations and CLI commands
- Maps the toolkit's exception family onto process exit codes
- Used by cli.py for consistent status reporting
"""

from utils.errors import (
    DataIntegrityError,
    InvalidArgumentError,
    NumericalRankError,
    ProtocolError,
    TrainingDivergedError,
)


class Status:
    """
    Status code constants for operation results.
    SUCCESS (0): Operation completed successfully.
    FAILURE (1): Operation failed for an unclassified reason.
    USAGE (2): Bad flags or configuration.
    DATA_INTEGRITY (3): Checksum, truncation or schema problem in a stored artifact.
    NUMERICAL (4): Numerical failure (singular codebook, diverged training, failed solve).
    """

    SUCCESS = 0
    FAILURE = 1
    USAGE = 2
    DATA_INTEGRITY = 3
    NUMERICAL = 4


def status_for_exception(exc: BaseException) -> int:
    """
    Pick the exit code for an exception raised by a toolkit operation.
    Args:
        exc (BaseException): The exception caught at the CLI boundary.
    Returns:
        int: One of the Status constants.
    """
    if isinstance(exc, DataIntegrityError):
        return Status.DATA_INTEGRITY
    if isinstance(exc, (NumericalRankError, TrainingDivergedError)):
        return Status.NUMERICAL
    if isinstance(exc, (InvalidArgumentError, ProtocolError)):
        return Status.USAGE
    return Status.FAILURE
