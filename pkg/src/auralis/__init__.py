"""Object-based spatial audio scene engine.

Pipeline layer: annotation bundles in, default projects out, multichannel
renders to WAV. Editing layer: immutable project snapshots with keyframe
and property edits, served over HTTP with a framed preview stream.
"""

from .errors import AuralisError
from .geometry import (
    CameraIntrinsics,
    RelativePosition,
    backproject,
    direction_of,
    intrinsics_from_fov,
    position_at,
    project,
    to_listener_frame,
)
from .ingest import (
    AMBIENT,
    AnnotationBundle,
    StemBinding,
    associate_tracks,
    bind_stems,
    build_default_project,
    ingest_bundle,
    parse_bundle,
)
from .scene import (
    EditViolation,
    ListenerPoseTrack,
    PositionKeyframe,
    SceneProject,
    SourceTrack,
    VideoMeta,
    load_project,
    remove_keyframe,
    save_project,
    set_track_property,
    upsert_keyframe,
    validate,
)
from .spatial import (
    DistanceParams,
    RenderedBuffer,
    SpeakerLayout,
    block_meters,
    distance_gain,
    get_layout,
    pan_gains,
    render_block,
    render_offline,
    source_channel_gains,
)
from .wav import AudioClip, read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AMBIENT",
    "AnnotationBundle",
    "AudioClip",
    "AuralisError",
    "CameraIntrinsics",
    "DistanceParams",
    "EditViolation",
    "ListenerPoseTrack",
    "PositionKeyframe",
    "RelativePosition",
    "RenderedBuffer",
    "SceneProject",
    "SourceTrack",
    "SpeakerLayout",
    "StemBinding",
    "VideoMeta",
    "associate_tracks",
    "backproject",
    "bind_stems",
    "block_meters",
    "build_default_project",
    "direction_of",
    "distance_gain",
    "get_layout",
    "ingest_bundle",
    "intrinsics_from_fov",
    "load_project",
    "pan_gains",
    "parse_bundle",
    "position_at",
    "project",
    "read_wav",
    "remove_keyframe",
    "render_block",
    "render_offline",
    "save_project",
    "set_track_property",
    "source_channel_gains",
    "to_listener_frame",
    "upsert_keyframe",
    "validate",
    "write_wav",
]
