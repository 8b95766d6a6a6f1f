"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class ProjinvError(Exception):
    """Base class for all engine errors."""

    exit_code = 1


class MalformedInput(ProjinvError, ValueError):
    exit_code = 2


class PreconditionError(ProjinvError, ValueError):
    exit_code = 3


class InvariantBreach(ProjinvError, RuntimeError):
    """An internal consistency check failed; always a bug."""

    exit_code = 4
