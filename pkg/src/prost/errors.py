"""Exception hierarchy. Every error carries a stable machine-readable code."""


class ProstError(Exception):
    code = "error"


class InvalidPositionError(ProstError):
    code = "invalid-position"


class ParseError(ProstError):
    """Syntax error with source location."""

    code = "syntax-error"

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class ProbabilitySumError(ProstError):
    code = "probability-sum-error"


class ExtraVariableError(ProstError):
    code = "extra-variable-error"


class VariableLhsError(ProstError):
    code = "variable-lhs-error"


class ArityMismatchError(ProstError):
    code = "arity-mismatch"


class NotATrsError(ProstError):
    code = "not-a-trs"


class InvalidRedexError(ProstError):
    code = "invalid-redex"


class ExhaustiveNotSchedulableError(ProstError):
    code = "exhaustive-not-schedulable"


class LimitZeroError(ProstError):
    code = "limit-zero"


class DepthExceedsBuiltError(ProstError):
    code = "depth-exceeds-built"


class NameClashError(ProstError):
    code = "name-clash"


class BvOfVariableError(ProstError):
    code = "bv-of-variable"


class SharedSymbolError(ProstError):
    code = "shared-symbol"


class VariableCapError(ProstError):
    code = "variable-cap"


class UnknownCorpusError(ProstError):
    code = "unknown-corpus"
