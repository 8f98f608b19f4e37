"""Exception hierarchy shared by all invstream modules."""


class InvStreamError(Exception):
    """Base class for every error raised by invstream."""


class ParseError(InvStreamError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class DuplicateVariableError(ParseError):
    pass


class LustreError(ParseError):
    """Unsupported construct, undefined stream or circular definition."""


class SortError(InvStreamError):
    def __init__(self, message, term=None):
        self.term = term
        if term is not None:
            message = f"{message}: {term}"
        super().__init__(message)


class NonlinearError(SortError):
    pass


class UnboundVariableError(SortError):
    pass


class TranslationError(InvStreamError):
    pass


class SolverError(InvStreamError):
    pass


class SolverSpawnError(SolverError):
    pass


class ProtocolError(SolverError):
    pass


class EnumerationError(InvStreamError):
    """Bounded enumeration impossible: missing bounds or state-count overflow."""


class DomainMismatchError(InvStreamError):
    pass
