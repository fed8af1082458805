"""Exception hierarchy shared by every layer of the toolkit."""


class VcredError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(VcredError):
    """Unknown backend or unsupported parameter combination."""


class UsageError(VcredError):
    """Elements from different groups or backends were combined."""


class InvalidLengthError(VcredError):
    pass


class PositionError(VcredError):
    pass


class KeyMismatchError(VcredError):
    pass


class CannotSatisfyError(VcredError):
    """The prover holds a witness that does not satisfy the statement."""


class CapacityError(VcredError):
    """A range predicate does not fit in the configured number of bits."""


class RedundantPredicateError(VcredError):
    pass


class DegenerateSerialError(VcredError):
    pass


class StaleEpochError(VcredError):
    """A proof was produced for a different revocation epoch."""


class SchemaError(VcredError):
    pass


class PolicyError(VcredError):
    pass


class DecodeError(VcredError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class VersionError(DecodeError):
    pass


class IntegrityError(DecodeError):
    """A digest did not recompute."""


class Rejected(VcredError):
    """A protocol step refused its input. ``reason`` is a :class:`Reason`."""

    def __init__(self, reason, detail=""):
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
        self.reason = reason
        self.detail = detail
