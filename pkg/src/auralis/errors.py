"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class AuralisError(Exception):
    """Base class for all engine errors."""


class ParseError(AuralisError):
    """Input is not well-formed (bad JSON, bad RIFF container)."""


class SchemaError(AuralisError):
    """Well-formed input that does not match the expected schema.

    ``path`` locates the offending field ("tracks[0].gain" style).
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantError(AuralisError):
    """Structurally valid document whose values break a documented invariant."""


class UnknownTrack(AuralisError):
    pass


class NonFiniteValue(AuralisError):
    pass


class InvalidValue(AuralisError):
    pass


class NoKeyframes(AuralisError):
    """A positional query hit a track with an empty effective timeline."""


class InvalidFov(AuralisError):
    pass


class NonPositiveDepth(AuralisError):
    pass


class UnsupportedFormat(AuralisError):
    pass


class UnsupportedRate(AuralisError):
    pass


class UnsupportedChannelCount(AuralisError):
    pass


class CorruptFile(AuralisError):
    pass


class SampleRateMismatch(AuralisError):
    pass


class EmptyBlock(AuralisError):
    pass


class NoProject(AuralisError):
    pass


class ValidationFailed(AuralisError):
    """Edit rejected; ``violations`` carries the per-field problems."""

    def __init__(self, violations):
        super().__init__("; ".join(f"{v.path}: {v.message}" for v in violations))
        self.violations = list(violations)


class VersionConflict(AuralisError):
    def __init__(self, base_version: int, head_version: int):
        super().__init__(f"edit based on version {base_version}, head is {head_version}")
        self.base_version = base_version
        self.head_version = head_version


class SessionLimit(AuralisError):
    pass
