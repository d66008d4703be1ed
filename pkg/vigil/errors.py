class ConfigError(Exception):
    """A scenario, schedule or run configuration could not be used."""


class FormatError(Exception):
    """A file or wire record does not follow its documented format."""


class ProtocolViolationError(Exception):
    """The escalation controller was driven with an input its phase table does not allow.
    This always points at a bug in whatever is driving the controller."""


class DomainError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass
