class EquivariantError(Exception):
    """Base class; ``code`` is stable and ends up in CLI error payloads.

    ``context`` collects where the error surfaced as it propagates; it is
    appended to the message.
    """

    code = "EQUIVARIANT_ERROR"
    exit_code = 2
    retryable = False

    def __init__(self, *args: object):
        super().__init__(*args)
        self.context: list[str] = []

    def with_context(self, note: str) -> "EquivariantError":
        self.context.append(note)
        return self

    def __str__(self) -> str:
        message = super().__str__()
        return "; ".join([message, *self.context]) if self.context else message

    def to_payload(self) -> dict:
        return {
            "code": self.code,
            "message": str(self),
            "retryable": self.retryable,
        }


class MissingImage(EquivariantError):
    code = "MISSING_IMAGE"


class DegreeMismatch(EquivariantError):
    code = "DEGREE_MISMATCH"


class CapExceeded(EquivariantError):
    code = "CAP_EXCEEDED"
    exit_code = 3
    retryable = True

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeded cap {cap}")
        self.what = what
        self.cap = cap


class PointOutOfRange(EquivariantError):
    code = "POINT_OUT_OF_RANGE"


class NotInGroup(EquivariantError):
    code = "NOT_IN_GROUP"


class UnknownGenerator(EquivariantError):
    code = "UNKNOWN_GENERATOR"


class SymbolOutOfRange(EquivariantError):
    code = "SYMBOL_OUT_OF_RANGE"


class UnknownSymbol(EquivariantError):
    code = "UNKNOWN_SYMBOL"


class ParseError(EquivariantError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ModeMismatch(EquivariantError):
    code = "MODE_MISMATCH"


class MalformedStep(EquivariantError):
    code = "MALFORMED_STEP"
    exit_code = 1


class ActionNotWellDefined(EquivariantError):
    code = "ACTION_NOT_WELL_DEFINED"
    exit_code = 1


class UnknownExample(EquivariantError):
    code = "UNKNOWN_EXAMPLE"


class PresentationFileError(EquivariantError):
    code = "PRESENTATION_FILE_INVALID"


class HomologyError(EquivariantError):
    code = "HOMOLOGY_ERROR"
    exit_code = 1
