"""Exception hierarchy shared across the package."""


class TelacompError(Exception):
    """Base class for all errors raised by telacomp."""


class ValidationError(TelacompError):
    """Structurally invalid input (out-of-range ids, malformed automata, ...)."""


class EmptyModelFamilyError(TelacompError):
    """Raised when an operation needs a satisfiable dual formula but got none."""

    code = "empty-model-family"


class UnsupportedFeatureError(TelacompError):
    """Input uses a feature outside the supported fragment."""

    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


class HoaParseError(TelacompError):
    """Syntax error in a HOA document, with 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class BudgetExceededError(TelacompError):
    """A construction ran past its macrostate budget."""

    def __init__(self, budget: int):
        super().__init__(f"macrostate budget of {budget} exceeded")
        self.budget = budget


class OracleLimitError(TelacompError):
    """The oracle's colour-subset enumeration would be too large."""
