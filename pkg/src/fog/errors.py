"""Exception types shared across the fog package."""


class FogError(Exception):
    """Base class for all errors raised by this package."""


class SimTimeOverflowError(FogError):
    """Scheduling an event past the 64-bit microsecond clock limit."""


class SimHandlerError(FogError):
    """An event handler raised; carries the event that was being dispatched."""

    def __init__(self, event, cause):
        super().__init__(f"handler for event {event!r} failed: {cause}")
        self.event = event
        self.cause = cause


class DistributionParameterError(FogError):
    """Invalid parameters for a sampling distribution (sigma < 0, a > b, ...)."""


class NoRouteError(FogError):
    """No link exists between the two nodes involved in a request."""


class CapsuleParseError(FogError):
    """Capsule file is malformed; `offset` points at the failing byte."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class PrivacyViolation(FogError):
    """Private-labeled data or weights would leave their trust domain."""


class DuplicateModel(FogError):
    """model_id + version already registered."""


class MixedDomain(FogError):
    """Private capsules from more than one trust domain in a single training set."""


class StageError(FogError):
    """Lifecycle operation not valid for the artifact's current stage."""


class CapacityExceeded(FogError):
    """Deployment would exceed the node's memory capacity."""


class NodeIsRobot(FogError):
    """Robots cannot host models."""


class FrameError(FogError):
    """Base class for wire-frame decode errors."""


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class UnknownType(FrameError):
    pass


class Truncated(FrameError):
    pass


class ProtocolError(FogError):
    """Peer sent bytes that do not follow the framed protocol."""


class InferenceTimeout(FogError):
    """Client gave up waiting for a response."""


class NoFeasiblePlan(FogError):
    """No assignment satisfies the placement constraints."""


class InfeasiblePlan(FogError):
    """Cost was requested for a plan that violates constraints."""


class ScenarioValidationError(FogError):
    """Scenario file failed schema or reference validation."""


class CalibrationError(FogError):
    """Round-trip statistics are inconsistent (rtt <= inf)."""


class DivergenceError(FogError):
    """Training produced non-finite losses; carries the trace so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace
