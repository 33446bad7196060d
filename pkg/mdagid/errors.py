"""
Exception hierarchy for mdagid.

Validation problems, verification failures and CI verdicts are returned as
data. Exceptions are reserved for inputs an operation cannot work with.
"""


class MdagError(Exception):
    """Base class for every error raised by the package"""


class UnknownVertexError(MdagError):
    def __init__(self, vertex):
        super().__init__(f"unknown vertex: {vertex}")
        self.vertex = vertex


class OverlappingSetsError(MdagError):
    pass


class MalformedContextError(MdagError):
    pass


class NotAnIndicatorError(MdagError):
    def __init__(self, vertex):
        super().__init__(f"not a response indicator: {vertex}")
        self.vertex = vertex


class InvalidGraphError(MdagError):
    def __init__(self, violations):
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid m-DAG: {lines}")
        self.violations = list(violations)
        located = [v for v in self.violations if getattr(v, 'line', None) is not None]
        if located:
            self.line, self.column = located[0].line, located[0].column


class ConditioningOnNull(MdagError):
    def __init__(self, given):
        super().__init__(f"conditioning event has probability zero: {given}")
        self.given = dict(given)


class UnboundVariable(MdagError):
    def __init__(self, name):
        super().__init__(f"variable is not bound by the assignment: {name}")
        self.name = name


class NotObservable(MdagError):
    def __init__(self, name, term):
        super().__init__(
            f"{term} reads {name} without its response indicator fixed to 1"
        )
        self.name = name
        self.term = term


class ZeroDenominator(MdagError):
    def __init__(self, term, cell=None):
        where = f" at {cell}" if cell else ""
        super().__init__(f"zero denominator in {term}{where}")
        self.term = term
        self.cell = dict(cell or {})


class NotApplicable(MdagError):
    pass


class NoApplicableTheorem(MdagError):
    def __init__(self, indicator, attempts=()):
        super().__init__(f"no identification step applies to {indicator}")
        self.indicator = indicator
        self.attempts = list(attempts)


class BadGamma(MdagError):
    pass


class MissingPath(MdagError):
    pass


class InfeasibleA(MdagError):
    def __init__(self, a, reason):
        super().__init__(f"a = {a} is infeasible: {reason}")
        self.a = a
        self.reason = reason


class ConstructionError(MdagError):
    pass


class SpecSyntaxError(MdagError):
    def __init__(self, message, line, column, source_line=""):
        caret = " " * max(column - 1, 0) + "^"
        super().__init__(f"line {line}, column {column}: {message}\n{source_line}\n{caret}")
        self.line = line
        self.column = column


class SpecSemanticError(MdagError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ExprSyntaxError(MdagError):
    pass


class UnknownCommandError(MdagError):
    pass


class NoMatchingCase(MdagError):
    def __init__(self, assignment):
        super().__init__(f"no case matches {dict(sorted(assignment.items()))}")
        self.assignment = dict(assignment)


class BadOrdering(MdagError):
    pass


class MissingSpecError(MdagError):
    def __init__(self, command):
        super().__init__(f"{command} needs a graph-spec file")
        self.command = command
