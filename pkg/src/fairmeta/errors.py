"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can map failures without string matching. Where a failure is
tied to a position in a template or record, ``path`` holds the dotted
field path and ``line`` the source line number.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""

    code = "ENGINE_ERROR"

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = []
        if path:
            prefix.append(f"at {path}")
        if line is not None:
            prefix.append(f"line {line}")
        if prefix:
            message = f"{message} ({', '.join(prefix)})"
        super().__init__(message)


class MalformedDocumentError(EngineError):
    code = "MALFORMED_DOCUMENT"


class UnknownValueKindError(EngineError):
    code = "UNKNOWN_VALUE_KIND"


class DuplicateSiblingNameError(EngineError):
    code = "DUPLICATE_SIBLING_NAME"


class ControlledWithoutValueSetError(EngineError):
    code = "CONTROLLED_WITHOUT_VALUESET"


class MalformedLineError(EngineError):
    code = "MALFORMED_LINE"


class NameCollisionError(EngineError):
    code = "NAME_COLLISION"


class AmbiguousValueError(EngineError):
    code = "AMBIGUOUS_VALUE"


class DuplicateIriError(EngineError):
    code = "DUPLICATE_IRI"


class UnknownVocabularyError(EngineError):
    code = "UNKNOWN_VOCABULARY"


class UnknownRootTermError(EngineError):
    code = "UNKNOWN_ROOT_TERM"


class UnknownTermError(EngineError):
    code = "UNKNOWN_TERM"


class ConflictingActionsError(EngineError):
    code = "CONFLICTING_ACTIONS"


class UnknownIssueError(EngineError):
    code = "UNKNOWN_ISSUE"


class InvalidManualValueError(EngineError):
    code = "INVALID_MANUAL_VALUE"


class NoProposedRepairError(EngineError):
    code = "NO_PROPOSED_REPAIR"


class DecisionConflictError(EngineError):
    code = "DECISION_CONFLICT"


class UnsupportedFormatError(EngineError):
    code = "UNSUPPORTED_FORMAT"
