"""Exception hierarchy. InputError maps to CLI exit code 2, ComputeError to 1."""


class DispersionError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DispersionError):
    """Malformed files, bad paths, invalid records, or broken invariants."""


class ValidationError(InputError):
    """A constructed object violates a model invariant."""


class ComputeError(DispersionError):
    """The computation itself cannot proceed on otherwise valid input."""


class DegenerateTopicError(ComputeError):
    """No summary proposition aligns to any document: coverage is 0/0."""


class AllTopicsSkippedError(ComputeError):
    """Every evaluation unit in the dataset was degenerate."""


class CapExceededError(ComputeError):
    """Exhaustive subset enumeration would exceed the configured cap."""


class ProtocolError(ComputeError):
    """A remote scorer responded with a malformed or out-of-contract payload."""


class TransportError(ComputeError):
    """A remote scorer was unreachable or kept failing after retries."""
