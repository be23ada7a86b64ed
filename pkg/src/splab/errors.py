"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SplabError(Exception):
    exit_code = 1


class DomainError(SplabError, ValueError):
    """An argument lies outside the range an operation is defined on."""

    exit_code = 2


class EmptyRangeError(DomainError):
    pass


class InvalidModulusError(DomainError):
    pass


class EngineDisagreement(SplabError):
    """Two independent counting engines returned different answers."""

    exit_code = 3


class CostGuardError(SplabError):
    """Refused to start a run whose cost exceeds the desk-scale guard."""

    exit_code = 4
