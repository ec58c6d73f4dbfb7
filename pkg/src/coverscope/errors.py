class CoverscopeError(Exception):
    """Root of every error raised by coverscope."""


class DomainError(CoverscopeError, ValueError):
    """An argument lies outside the domain of the operation."""


class VerificationError(CoverscopeError):
    """An operation needed a verified claim as its starting point and did not get one."""


class CorpusParseError(CoverscopeError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
