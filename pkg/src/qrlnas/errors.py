"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A user-supplied configuration value is out of range or inconsistent."""


class ContractViolationError(ValueError):
    """An argument violates an operation's precondition."""


class OracleScaleError(ValueError):
    """The dense-unitary test oracle was asked for more qubits than it supports."""


class BridgeError(RuntimeError):
    """The external-environment bridge failed (spawn, framing, timeout, or remote error)."""


class ProtocolOrderError(BridgeError):
    """A bridge request was issued in an invalid protocol phase."""
