"""Exception hierarchy shared across the pipeline.

Every error raised on purpose by this package derives from ``HrexError`` so
the CLI can map it to exit status 2 (fatal) or record it per sample.
"""

from __future__ import annotations


class HrexError(Exception):
    """Base class for all pipeline errors."""


# --- file and schema errors -------------------------------------------------


class FileUnreadable(HrexError):
    def __init__(self, path, reason: str = ""):
        self.path = str(path)
        super().__init__(f"cannot read {self.path}" + (f": {reason}" if reason else ""))


class SchemaViolation(HrexError, ValueError):
    """Input does not follow the documented file schema.

    ``where`` pins the location: a field path, a 1-based line, or a record index.
    """

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


class DuplicateName(HrexError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate ontology entry {name!r}")


class DuplicateId(HrexError, ValueError):
    def __init__(self, sample_id: str, line: int | None = None):
        self.sample_id = sample_id
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate sample id {sample_id!r}{loc}")


class SpanOutOfRange(HrexError, ValueError):
    def __init__(self, record_index: int, span, n_tokens: int):
        self.record_index = record_index
        self.span = span
        self.n_tokens = n_tokens
        super().__init__(f"record {record_index}: span {span} outside 0..{n_tokens}")


class SubsetTooLarge(HrexError, ValueError):
    def __init__(self, n: int, available: int):
        super().__init__(f"requested {n} samples but only {available} available")


# --- prompt errors ----------------------------------------------------------


class ExemplarUnparseable(HrexError, ValueError):
    pass


class EmptySentence(HrexError, ValueError):
    pass


# --- gateway errors ---------------------------------------------------------


class GatewayError(HrexError):
    """Failure while obtaining a completion.

    ``run_index`` is filled in by repeated-run orchestration so callers know
    which run failed.
    """

    run_index: int | None = None


class AuthMissing(GatewayError):
    pass


class BackendTimeout(GatewayError):
    pass


class BackendError(GatewayError):
    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class RateLimited(GatewayError):
    def __init__(self, retry_after: float | None = None):
        self.retry_after = retry_after
        hint = f" (retry after {retry_after:g}s)" if retry_after is not None else ""
        super().__init__("rate limited" + hint)


class ReplayMiss(GatewayError):
    def __init__(self, cache_key: str):
        self.cache_key = cache_key
        super().__init__(f"no replay fixture for key {cache_key}")


# --- evaluation errors ------------------------------------------------------


class RunCountMismatch(HrexError, ValueError):
    pass


class TooFewRuns(HrexError, ValueError):
    pass


class SimilarityOutOfRange(HrexError, ValueError):
    def __init__(self, value: float, backend: str = ""):
        self.value = value
        super().__init__(f"similarity backend {backend!r} returned {value!r}, outside [0, 1]")


class EmptyInput(HrexError, ValueError):
    pass


class IdMismatch(HrexError, ValueError):
    def __init__(self, missing: list[str]):
        self.missing = missing
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        super().__init__(f"{len(missing)} prediction id(s) not in gold: {shown}")


class MetricUnknown(HrexError, ValueError):
    pass
