"""Exception hierarchy.

Errors split into two families so the command line can map them onto
exit codes: ``ValidationError`` for bad inputs (exit 1) and
``RuntimeFailure`` for things that went wrong while doing the work (exit 2).
"""

from __future__ import annotations

from datetime import datetime


class SkillminerError(Exception):
    pass


class ValidationError(SkillminerError):
    """Input data or arguments failed validation."""


class RuntimeFailure(SkillminerError):
    """Work could not be completed (network, I/O)."""


class ArchiveParseError(ValidationError):
    def __init__(self, message: str, *, line: int | None = None, record: str | None = None):
        self.line = line
        self.record = record
        where = []
        if line is not None:
            where.append(f"line {line}")
        if record is not None:
            where.append(record)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class IntegrityError(ValidationError):
    def __init__(self, message: str, *, record: str):
        self.record = record
        super().__init__(f"{record}: {message}")


class PreconditionError(ValidationError):
    pass


class MergeConflictError(ValidationError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"conflicting records for key {key}")


class MissingTableError(ValidationError):
    def __init__(self, metric_id: str):
        self.metric_id = metric_id
        super().__init__(f"distribution table {metric_id!r} is missing")


class UnusableTableError(ValidationError):
    def __init__(self, metric_id: str, population_size: int):
        self.metric_id = metric_id
        super().__init__(
            f"distribution table {metric_id!r} has {population_size} samples; at least 2 are required"
        )


class UnknownUserError(ValidationError):
    def __init__(self, login: str):
        self.login = login
        super().__init__(f"user {login!r} is not in the archive")


class AssessmentParseError(ValidationError):
    def __init__(self, message: str, *, row: int):
        self.row = row
        super().__init__(f"row {row}: {message}")


class ArchiveIOError(RuntimeFailure):
    pass


class FetchError(RuntimeFailure):
    """Base for ingestion failures; records which entities were finished."""

    def __init__(self, message: str, *, completed: list[str] | None = None, missing: list[str] | None = None):
        self.completed = list(completed or [])
        self.missing = list(missing or [])
        super().__init__(message)


class AuthError(FetchError):
    pass


class RateLimitError(FetchError):
    def __init__(self, reset_at: datetime, **kwargs):
        self.reset_at = reset_at
        super().__init__(f"rate limit exhausted; retry after {reset_at.isoformat()}", **kwargs)


class PartialFetchError(FetchError):
    def __init__(self, cause: str, *, completed: list[str], missing: list[str]):
        super().__init__(
            f"fetch incomplete ({cause}); completed: {', '.join(completed) or '-'}; "
            f"missing: {', '.join(missing) or '-'}",
            completed=completed,
            missing=missing,
        )
