"""Exception hierarchy for the platform.

Every error carries a stable ``code`` string that the HTTP layer echoes in
JSON error bodies, so clients can match on codes instead of messages.
"""


class UptrendzError(Exception):
    """Base class for all platform errors."""

    code = "Error"

    def __init__(self, message: str = "", **detail):
        super().__init__(message or self.code)
        self.detail = detail


# --- configuration / registry ---------------------------------------------

class InvalidName(UptrendzError):
    code = "InvalidName"


class DuplicateName(UptrendzError):
    code = "DuplicateName"


class UnknownDomain(UptrendzError):
    code = "UnknownDomain"


class InvalidAttribute(UptrendzError):
    code = "InvalidAttribute"

    def __init__(self, name: str, reason: str):
        super().__init__(f"attribute {name!r}: {reason}", name=name, reason=reason)
        self.name = name
        self.reason = reason


class DuplicateEntityType(UptrendzError):
    code = "DuplicateEntityType"


class UnknownEntityType(UptrendzError):
    code = "UnknownEntityType"


class DuplicateInteractionType(UptrendzError):
    code = "DuplicateInteractionType"


class UnknownInteractionType(UptrendzError):
    code = "UnknownInteractionType"


class DuplicateScenario(UptrendzError):
    code = "DuplicateScenario"


class UnknownScenario(UptrendzError):
    code = "UnknownScenario"


class CrossDomainHybrid(UptrendzError):
    """A hybrid component recommends a different entity type than the hybrid itself."""

    code = "CrossDomainHybrid"


class NestedHybrid(UptrendzError):
    """Hybrid scenarios may only combine non-hybrid components."""

    code = "NestedHybrid"


class InvalidWeights(UptrendzError):
    code = "InvalidWeights"


class InvalidScenario(UptrendzError):
    code = "InvalidScenario"


# --- catalog store ----------------------------------------------------------

class SchemaViolation(UptrendzError):
    code = "SchemaViolation"

    def __init__(self, attribute: str, reason: str):
        super().__init__(f"{attribute}: {reason}", attribute=attribute, reason=reason)
        self.attribute = attribute
        self.reason = reason


class PayloadTooLarge(UptrendzError):
    code = "PayloadTooLarge"


class ActorModeViolation(UptrendzError):
    code = "ActorModeViolation"


class ExplicitnessViolation(UptrendzError):
    code = "ExplicitnessViolation"


class UnknownTarget(UptrendzError):
    code = "UnknownTarget"


class UnknownEntity(UptrendzError):
    code = "UnknownEntity"


class CorruptLog(UptrendzError):
    code = "CorruptLog"

    def __init__(self, offset: int, message: str = ""):
        super().__init__(message or f"corrupt log record at byte offset {offset}", offset=offset)
        self.offset = offset


# --- content index ----------------------------------------------------------

class NonTextAttribute(UptrendzError):
    code = "NonTextAttribute"


class EmptyProfile(UptrendzError):
    """The context entity has an empty term vector."""

    code = "EmptyProfile"


# --- engines ----------------------------------------------------------------

class ColdStartActor(UptrendzError):
    """The target actor has no interactions contributing to this scenario."""

    code = "ColdStartActor"


class NoAudience(UptrendzError):
    """Nobody has interacted with the context item yet."""

    code = "NoAudience"


class FilterSchemaMismatch(UptrendzError):
    code = "FilterSchemaMismatch"


# --- gateway ----------------------------------------------------------------

class AudienceViolation(UptrendzError):
    code = "AudienceViolation"


class MissingContext(UptrendzError):
    code = "MissingContext"


class Busy(UptrendzError):
    """The domain's request queue is full; retry later."""

    code = "Busy"


class EngineError(UptrendzError):
    code = "EngineError"


# --- evaluation harness -----------------------------------------------------

class MissingFile(UptrendzError):
    code = "MissingFile"


class ParseError(UptrendzError):
    code = "ParseError"

    def __init__(self, file: str, line: int, message: str = ""):
        super().__init__(message or f"{file}:{line}: unparsable record", file=file, line=line)
        self.file = file
        self.line = line


class NoTestUsers(UptrendzError):
    code = "NoTestUsers"


class OracleMismatch(UptrendzError):
    code = "OracleMismatch"
