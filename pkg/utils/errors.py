"""
Exception family shared by all toolkit modules.

Responsibilities:
- Names the error kinds the modules raise (invalid arguments, numerical rank problems,
  diverged training, corrupted artifacts, CEU protocol violations)
- Lets cli.py translate failures into exit codes without string matching
"""


class InvalidArgumentError(ValueError):
    """An argument is outside the operation's domain (bad index, shape, range)."""


class NumericalRankError(ArithmeticError):
    """A matrix that must be invertible is singular or too ill-conditioned to use."""


class TrainingDivergedError(ArithmeticError):
    """Training produced a NaN or infinite loss."""

    def __init__(self, message: str, history: list | None = None):
        super().__init__(message)
        self.history = history or []


class DataIntegrityError(Exception):
    """A stored dataset, model or cache file failed checksum, size or schema checks."""


class ProtocolError(RuntimeError):
    """The CEU cache and pilot schedule disagree."""
