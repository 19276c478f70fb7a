"""Exception hierarchy shared by all qkds modules."""


class QKError(Exception):
    """Base class for every error raised by qkds."""


class UnknownAtom(QKError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown atom {self.name!r}"


class EmptyInstance(QKError, ValueError):
    def __str__(self):
        return self.args[0] if self.args else "instances must be nonempty"


class FormulaSyntaxError(QKError):
    """Raised by the parser; carries the offending character offset."""

    def __init__(self, position, expected, found=None, line=None):
        self.position = position
        self.expected = expected
        self.found = found
        self.line = line
        super().__init__(self._message())

    def _message(self):
        where = f"line {self.line}, " if self.line is not None else ""
        got = f", found {self.found!r}" if self.found is not None else ""
        return f"{where}offset {self.position}: expected {self.expected}{got}"


class MalformedBounds(FormulaSyntaxError):
    pass


class MissingAtomsHeader(QKError):
    pass


class OpenFormula(QKError):
    """A formula with a free occurrence of the variable modality x."""


class OpenFormulaAssertion(OpenFormula):
    pass


class FreeVariableUnassigned(QKError):
    pass


class LimitsExceeded(QKError):
    pass


class UnknownVar(QKError, IndexError):
    pass


class InternalVerificationFailure(QKError):
    """A SAT verdict whose extracted model does not satisfy the input."""
