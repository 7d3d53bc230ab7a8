"""Error taxonomy shared by the core, the CLI and the HTTP service.

Every error carries a stable machine-readable ``code`` (used in API bodies
and on stderr), a process exit code for the CLI, and an HTTP status for the
service. The mapping is part of the tool's documented interface.
"""

from __future__ import annotations


class ChronoLintError(Exception):
    """Base class for all tool errors."""

    code = "InternalError"
    exit_code = 1
    http_status = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class BranchNotFound(ChronoLintError):
    code = "BranchNotFound"
    exit_code = 2
    http_status = 422


class RepoAccessError(ChronoLintError):
    code = "RepoAccessError"
    exit_code = 2
    http_status = 422


class CorruptHistory(ChronoLintError):
    code = "CorruptHistory"
    exit_code = 2
    http_status = 500


class WorkspaceError(ChronoLintError):
    code = "WorkspaceError"
    exit_code = 2
    http_status = 500


class AuthError(ChronoLintError):
    code = "AuthError"
    exit_code = 4
    http_status = 502


class RemoteError(ChronoLintError):
    code = "RemoteError"
    exit_code = 4
    http_status = 502


class InvalidRange(ChronoLintError):
    code = "InvalidRange"
    exit_code = 2
    http_status = 422


class RulepackError(ChronoLintError):
    code = "RulepackError"
    exit_code = 2
    http_status = 422


class CoverageFormatError(ChronoLintError):
    code = "CoverageFormatError"
    exit_code = 2
    http_status = 422


class EmptyRun(ChronoLintError):
    code = "EmptyRun"
    exit_code = 3
    http_status = 422


class WeightError(ChronoLintError):
    code = "WeightError"
    exit_code = 2
    http_status = 422


class MissingCategoryError(ChronoLintError):
    code = "MissingCategoryError"
    exit_code = 2
    http_status = 422


class ComparabilityViolation(ChronoLintError):
    code = "ComparabilityViolation"
    exit_code = 6
    http_status = 409


class StoreCorruption(ChronoLintError):
    code = "StoreCorruption"
    exit_code = 7
    http_status = 500


class NotFound(ChronoLintError):
    code = "NotFound"
    exit_code = 2
    http_status = 404


class UnknownMetric(ChronoLintError):
    code = "UnknownMetric"
    exit_code = 2
    http_status = 422
