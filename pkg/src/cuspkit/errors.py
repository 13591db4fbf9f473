"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries one.
"""


class CuspkitError(Exception):
    exit_code = 1


class UsageError(CuspkitError, ValueError):
    """Bad arguments, malformed input, or a violated precondition."""

    exit_code = 2


class UnknownVertexError(UsageError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class PreconditionError(UsageError):
    pass


class ParseError(UsageError):
    pass


class OracleError(CuspkitError):
    """A group oracle contradicted itself."""


class VerificationError(CuspkitError):
    """A property or internal-consistency check failed."""

    exit_code = 1


class BudgetExceeded(CuspkitError):
    """A search or enumeration hit its resource bound before deciding."""

    exit_code = 3
