"""Exception types shared across the toolkit."""


class ProxyAuditError(Exception):
    """Base class for all toolkit errors."""


class ProgramSyntaxError(ProxyAuditError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ProgramTypeError(ProxyAuditError):
    pass


class PositionError(ProxyAuditError):
    pass


class UnknownVariable(ProxyAuditError):
    pass


class UnboundVariable(ProxyAuditError):
    pass


class DivisionByZero(ProxyAuditError):
    def __init__(self, row=None):
        self.row = row
        msg = "division by zero"
        if row is not None:
            msg += f" (row {row})"
        super().__init__(msg)


class LimitExceeded(ProxyAuditError):
    pass


class IoError(ProxyAuditError):
    pass


class MissingColumn(ProxyAuditError):
    pass


class RaggedRow(ProxyAuditError):
    pass


class TooFewRows(ProxyAuditError):
    pass


class MissingLabel(ProxyAuditError):
    pass


class StaleWitness(ProxyAuditError):
    pass


class UnknownFingerprint(ProxyAuditError):
    pass


class UnknownSession(ProxyAuditError):
    pass


class UnknownFeature(ProxyAuditError):
    pass


class EmptyModel(ProxyAuditError):
    pass


class OracleSuspended(ProxyAuditError):
    """Raised when the repair loop hits witnesses nobody has judged yet."""

    def __init__(self, undecided):
        self.undecided = list(undecided)
        super().__init__(
            f"{len(self.undecided)} witness(es) await a judgment"
        )
