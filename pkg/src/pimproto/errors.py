"""Engine error types.

Every error carries a stable machine-readable ``code`` (its class name) so
CLI diagnostics and HTTP responses can classify failures without matching
on message text.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.path = path

    @property
    def code(self) -> str:
        return type(self).__name__


class EmptyName(DomainError):
    pass


class InvalidName(DomainError):
    pass


class DuplicateScreenName(DomainError):
    pass


class DuplicateHotspotName(DomainError):
    pass


class UnknownScreen(DomainError):
    pass


class UnknownHotspot(DomainError):
    pass


class UnknownImage(DomainError):
    pass


class InvalidRect(DomainError):
    pass


class InvalidPoint(DomainError):
    pass


class InvalidBehaviourName(DomainError):
    pass


class UnknownState(DomainError):
    pass


class EmptyProject(DomainError):
    pass


class NoInitialScreen(DomainError):
    pass


class NameCollision(DomainError):
    pass


class InvalidPim(DomainError):
    """Raised when an operation requires a PIM that passes validation."""

    def __init__(self, message: str, *, path: str | None = None, violations=None):
        super().__init__(message, path=path)
        self.violations = list(violations or [])


class TargetIsInitial(DomainError):
    pass


class BehaviourNotEnabled(DomainError):
    pass


class OperationCancelled(DomainError):
    pass


class ParseError(DomainError):
    """Syntax error in a document; always positioned."""

    def __init__(self, message: str, *, line: int = 1, column: int = 1,
                 path: str | None = None):
        super().__init__(f"{line}:{column}: {message}", path=path)
        self.line = line
        self.column = column
        self.detail = message


class VersionUnsupported(DomainError):
    pass


class InvariantViolation(DomainError):
    """Document parses but the resulting model breaks an invariant."""

    def __init__(self, message: str, *, path: str | None = None, violations=None):
        super().__init__(message, path=path)
        self.violations = list(violations or [])


class UnsupportedMediaType(DomainError):
    pass


class CorruptImage(DomainError):
    pass


class PortInUse(DomainError):
    pass


class DataDirUnwritable(DomainError):
    pass
