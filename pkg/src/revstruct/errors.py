class InputError(ValueError):
    """Malformed user input; carries an optional 1-based line number."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        super().__init__(message)

    def __str__(self) -> str:
        msg = super().__str__()
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(f"line {self.line}")
        return f"{':'.join(where)}: {msg}" if where else msg


class GuardExceeded(ValueError):
    """An exhaustive oracle refused to run because the input is too large."""


class WitnessError(ValueError):
    """A witness or certificate failed re-validation."""
