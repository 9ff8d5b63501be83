"""Exception types.  Each carries a machine-readable ``code`` used by the CLI."""


class ShallowUNError(Exception):
    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_record(self) -> dict:
        rec = {"code": self.code, "message": str(self)}
        if self.details:
            rec["details"] = {k: v for k, v in sorted(self.details.items())}
        return rec


class InvalidPosition(ShallowUNError):
    code = "invalid-position"


class NotFlat(ShallowUNError):
    code = "not-flat"


class NotShallow(ShallowUNError):
    code = "not-shallow"


class CapExceeded(ShallowUNError):
    code = "cap-exceeded"


class UnknownEquation(ShallowUNError):
    code = "unknown-equation"


class ParseError(ShallowUNError):
    code = "syntax-error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}", line=line, column=column)
        self.line = line
        self.column = column


class ArityConflict(ShallowUNError):
    code = "arity-conflict"


class VariableAsLhs(ShallowUNError):
    code = "variable-as-lhs"


class NotASolution(ShallowUNError):
    code = "not-a-solution"


class IndexOutOfRange(ShallowUNError):
    code = "index-out-of-range"


class InvalidInstance(ShallowUNError):
    code = "invalid-instance"
