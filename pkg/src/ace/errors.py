"""Exception hierarchy shared across the engine."""


class AceError(Exception):
    """Base class for all engine errors."""


class InputError(AceError):
    """Caller supplied an argument that violates a precondition."""


class TransportError(AceError):
    """Network-level failure talking to a model backend (retryable once)."""


class GatewayTimeout(AceError):
    """The backend did not answer within the profile timeout."""


class BackendError(AceError):
    """The backend answered with a non-2xx status or a broken payload."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class CapabilityMissingError(AceError):
    """The configured backend lacks a requested capability (e.g. rerank)."""


class IndexBuildError(AceError):
    """Index construction failed (empty chunk set, dimension mismatch)."""


class IndexFormatError(AceError):
    """A persisted index file is corrupt, truncated, or version-incompatible."""


class RoutingError(AceError):
    """The routing call itself failed (the assistant is unavailable)."""


class DecompositionError(AceError):
    """Topic decomposition produced no usable subtopics after retry."""


class FrameworkError(AceError):
    """Concept-framework extraction returned unusable output."""


class SynthesisError(AceError):
    """Item synthesis returned zero parseable items."""


class PlanError(AceError):
    """Plan generation produced no parseable steps after retry."""


class ReferenceSnippetError(AceError):
    """Reference-snippet generation exhausted its internal attempt budget."""


class SandboxSetupError(AceError):
    """The sandbox itself failed to start (not a property of the code run)."""


class SessionError(AceError):
    """A session operation was invalid for the session's current state."""


class SessionExpiredError(SessionError):
    """The referenced session exceeded its idle TTL."""


class UndefinedCorrelationError(AceError):
    """Rank correlation is undefined (a constant input vector)."""
