"""Exception hierarchy. Every error carries a machine-readable ``code``
used verbatim in CLI diagnostics and the HTTP error envelope."""

from __future__ import annotations


class ThermosolveError(Exception):
    code = "Error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def envelope(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class ParseError(ThermosolveError):
    """Malformed text input (YAML document or expression string)."""

    code = "ParseError"

    def __init__(self, message, source=None, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        src = f" in {source}" if source else ""
        super().__init__(f"{message}{loc}{src}", source=source, line=line, column=column)
        self.line = line
        self.column = column
        self.source = source


class UnknownFunction(ParseError):
    code = "UnknownFunction"


class DuplicateName(ThermosolveError):
    code = "DuplicateName"


class DanglingReference(ThermosolveError):
    code = "DanglingReference"

    def __init__(self, missing: str, referrer: str):
        super().__init__(f"{referrer} refers to undefined element {missing!r}",
                         missing=missing, referrer=referrer)
        self.missing = missing


class CyclicInheritance(ThermosolveError):
    code = "CyclicInheritance"

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("is_a cycle: " + " -> ".join(self.cycle), cycle=self.cycle)


class UnknownElement(ThermosolveError):
    code = "UnknownElement"


class UnknownMaterial(ThermosolveError):
    code = "UnknownMaterial"

    def __init__(self, name, available):
        super().__init__(f"unknown material {name!r}; available: {', '.join(available)}",
                         name=name, available=list(available))


class UnknownRule(ThermosolveError):
    code = "UnknownRule"


class UnknownAttribute(ThermosolveError):
    code = "UnknownAttribute"


class UnknownVariable(ThermosolveError):
    code = "UnknownVariable"


class UnknownProcessClass(ThermosolveError):
    code = "UnknownProcessClass"


class DomainError(ThermosolveError):
    """Arithmetic left the real domain (ln of non-positive, x/0, 0^negative)."""

    code = "DomainError"

    def __init__(self, message, subexpression=None):
        super().__init__(message, subexpression=subexpression)
        self.subexpression = subexpression


class MissingValue(ThermosolveError):
    code = "MissingValue"


class NoSolution(ThermosolveError):
    code = "NoSolution"


class MultipleOccurrenceUnsolved(ThermosolveError):
    code = "MultipleOccurrenceUnsolved"


class UnboundSlot(ThermosolveError):
    code = "UnboundSlot"


class InvalidValue(ThermosolveError):
    code = "InvalidValue"


class AlreadyFinalized(ThermosolveError):
    code = "AlreadyFinalized"


class NonPositiveValue(ThermosolveError):
    code = "NonPositiveValue"


class NotANumber(ThermosolveError):
    code = "NotANumber"


class TargetIsKnown(ThermosolveError):
    code = "TargetIsKnown"


class IncompleteDefinition(ThermosolveError):
    code = "IncompleteDefinition"

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("problem definition incomplete; missing: " + ", ".join(self.missing),
                         missing=self.missing)


class NotSolvable(ThermosolveError):
    code = "NotSolvable"

    def __init__(self, unreached):
        self.unreached = sorted(unreached)
        super().__init__("no single-equation solution path reaches: " + ", ".join(self.unreached),
                         unreached=self.unreached)


class InconsistentInput(ThermosolveError):
    """Over-determined input contradicts an instantiated equation."""

    code = "InconsistentInput"

    def __init__(self, equation, residual, tolerance):
        super().__init__(
            f"given values violate {equation} (residual {residual:.3e} > {tolerance:.1e})",
            equation=equation, residual=residual, tolerance=tolerance)
        self.equation = equation
        self.residual = residual
