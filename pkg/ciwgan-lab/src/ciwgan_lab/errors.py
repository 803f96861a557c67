"""Exception types for the lab."""

from __future__ import annotations


class LabError(Exception):
    """Base class for lab errors."""


class DataError(LabError):
    """Training data or manifest problem."""


class CheckpointMismatchError(LabError):
    """Checkpoint does not match the requested latent spec or architecture."""


class TrainingDivergedError(LabError):
    """A non-finite loss appeared; the last good checkpoint is retained."""
