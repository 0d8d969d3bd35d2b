"""Exception hierarchy shared by every module.

The CLI maps these onto exit statuses: input errors exit 2, capability
errors exit 3. Everything else is reported as a failure of the stage that
raised it.
"""


class RobustPartError(Exception):
    """Base class for all library errors."""


class InputError(RobustPartError, ValueError):
    """Malformed or out-of-range input."""


class CapabilityError(RobustPartError):
    """A configured size bound (exhaustive, oracle) would be exceeded."""


class PreconditionError(RobustPartError):
    """A checked hypothesis of a construction does not hold."""


class ContractError(RobustPartError):
    """A caller-supplied certificate or witness failed re-verification."""


class RefinementError(RobustPartError):
    """The partition engine could not produce a validated partition."""

    def __init__(self, message: str, offending=None, diagnostics=None):
        super().__init__(message)
        self.offending = offending
        self.diagnostics = diagnostics or {}


class AssemblyError(RobustPartError):
    """Hamilton cycle assembly failed in a specific class."""

    def __init__(self, message: str, class_index=None):
        super().__init__(message)
        self.class_index = class_index


class AnchoringError(PreconditionError):
    """A path endpoint lies outside every class."""
