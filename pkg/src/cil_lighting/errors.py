"""Exception hierarchy; each category maps to a stable CLI exit code."""


class CILError(Exception):
    exit_code = 1


class ParseError(CILError):
    """Malformed input file. Carries optional row/column coordinates."""

    exit_code = 2

    def __init__(self, message, row=None, column=None, source=None):
        self.row = row
        self.column = column
        self.source = source
        super().__init__(message)

    def __str__(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column!r}")
        msg = super().__str__()
        return f"{', '.join(where)}: {msg}" if where else msg


class ValidationError(CILError, ValueError):
    exit_code = 3


class ConfigurationError(CILError):
    exit_code = 4


class UnknownNameError(ConfigurationError):
    """Lookup of an environment, objective or parameter token failed."""

    def __init__(self, kind, name, known):
        self.kind = kind
        self.name = name
        self.known = sorted(known)
        super().__init__(f"unknown {kind} {name!r}; known: {', '.join(self.known)}")


class MissingValueError(CILError):
    """Raised when a Missing measurement reaches classification."""
