"""Exception hierarchy shared by every layer of the engine."""


class CRError(Exception):
    """Base class for all errors raised by crbidisk."""


class ContextMismatch(CRError):
    """Two series built over different variable contexts were combined."""


class DegenerateAtOrigin(CRError):
    """A series with vanishing constant term was inverted."""


class BranchError(CRError):
    """A square root was requested outside the supported principal branch."""


class PrecisionExhausted(CRError):
    """Differentiation was requested past the verified truncation degree."""


class FormDegreeError(CRError):
    """An exterior form of degree four or more would have been produced."""


class FiberDegreeOverflow(CRError):
    """A fiber polynomial exceeded the configured degree cap."""


class NotReal(CRError):
    """The defining function is not fixed by conjugation."""


class InvalidDefiningFunction(CRError):
    """The defining function violates a structural requirement (F(0) != 0, v-dependence)."""


class LeviDegenerate(CRError):
    """The Levi matrix is singular at the origin."""


class WrongSignature(CRError):
    """The Levi matrix at the origin does not have signature (2, 2)."""

    def __init__(self, signature, message=None):
        self.signature = tuple(signature)
        super().__init__(message or f"Levi signature at origin is {self.signature}, expected (2, 2)")


class PivotDegenerate(CRError):
    """Ordered Hermitian elimination hit a pivot vanishing at the origin."""


class InconsistentInput(CRError):
    """Numerical input contradicts a stated precondition (e.g. isotropy)."""


class ParseError(CRError):
    """Base class for defining-function syntax errors; carries a source position."""

    kind = "ParseError"

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{self.kind} at line {line}, column {column}: {message}")


class LexicalError(ParseError):
    kind = "LexicalError"


class UnbalancedParentheses(ParseError):
    kind = "UnbalancedParentheses"


class NegativeExponent(ParseError):
    kind = "NegativeExponent"


class FractionalExponent(ParseError):
    kind = "FractionalExponent"


class UnknownIdentifier(ParseError):
    kind = "UnknownIdentifier"


class DecimalLiteral(ParseError):
    kind = "DecimalLiteral"


class ZeroDenominator(ParseError):
    kind = "ZeroDenominator"


class UnexpectedToken(ParseError):
    kind = "UnexpectedToken"


class DegreeTooHigh(CRError):
    """The user polynomial has total degree above the truncation order."""
