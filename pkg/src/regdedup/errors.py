"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class RegdedupError(Exception):
    """Base class for all errors raised by this package."""


class RefParseError(RegdedupError, ValueError):
    """A profile reference string could not be parsed."""


class ClaimDirectionError(RegdedupError, ValueError):
    """A claim violates the registry claim-direction matrix."""


class IngestError(RegdedupError):
    """A dump could not be read at all (fatal for that registry)."""


class NotComparableError(RegdedupError, ValueError):
    """Pairwise similarity requested for a profile without a usable name."""


class ContractViolationError(RegdedupError):
    """A stage precondition was violated (e.g. non-disjoint input sets)."""


class ValidationError(RegdedupError, ValueError):
    """A review decision or request payload failed validation."""


class NotFoundError(RegdedupError, KeyError):
    """Lookup of a set or profile id failed."""


class StageOrderError(RegdedupError):
    """A pipeline command ran before its predecessor stage completed."""

    def __init__(self, message: str, expected_command: str | None = None):
        super().__init__(message)
        self.expected_command = expected_command


class IntegrityError(RegdedupError):
    """Run-directory contents do not match the manifest digests."""


class StaleRunError(RegdedupError):
    """A decision referenced a pipeline run that has been superseded."""
