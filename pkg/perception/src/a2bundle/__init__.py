"""Annotation bundle producer: model adapters plus synthetic fixtures."""

from .analyze import (
    Adapters,
    AnalyzeConfig,
    DecodeError,
    ModelUnavailable,
    analyze_frames,
    analyze_video,
    default_adapters,
)
from .synth import AmbientSpec, InvalidSpec, ObjectSpec, SoundSpec, SynthSpec, parse_spec, synth_fixture

__all__ = [
    "Adapters",
    "AmbientSpec",
    "AnalyzeConfig",
    "DecodeError",
    "InvalidSpec",
    "ModelUnavailable",
    "ObjectSpec",
    "SoundSpec",
    "SynthSpec",
    "analyze_frames",
    "analyze_video",
    "default_adapters",
    "parse_spec",
    "synth_fixture",
]
