"""Editable scene document: sounding-object tracks, listener pose, output layout.

Projects are immutable snapshots. Every edit operation returns a new
snapshot and leaves the input untouched, so snapshots can be handed to a
render thread without locking.

The on-disk form is UTF-8 JSON (extension ``.auralis.json``) with top-level
keys ``video``, ``tracks``, ``listener``, ``layout``, ``intrinsics`` and
``use_model_positions``. Serialization is canonical: keys sorted, floats
fixed at 6 decimal digits, 2-space indent. Two structurally equal projects
produce byte-identical files.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, replace

from .errors import (
    InvalidValue,
    InvariantError,
    NonFiniteValue,
    ParseError,
    SchemaError,
    UnknownTrack,
)
from .geometry import CameraIntrinsics

LAYOUT_IDS = ("mono", "stereo", "quad", "five_one")

ORIGIN_MODEL = "model"
ORIGIN_USER = "user"

GAIN_MAX = 4.0  # +12 dB cap; keeps runaway volume edits bounded

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class VideoMeta:
    width: int
    height: int
    fps: float
    duration: float


@dataclass(frozen=True)
class PositionKeyframe:
    """World position sample at time ``t``.

    Coordinates are meters, right-handed: +x right, +y up, -z forward.
    ``origin`` records whether the value came from the perception pipeline
    ("model") or from a user edit ("user").
    """

    t: float
    p: Vec3
    origin: str = ORIGIN_MODEL


@dataclass(frozen=True)
class SourceTrack:
    """One sounding object: a bound audio stem plus positional timelines.

    Model and user keyframes are kept in separate lists so queries can
    distinguish provenance; see :func:`auralis.geometry.position_at`.
    ``directional=False`` marks ambient content that renders center-front
    without panning or distance attenuation.
    """

    id: str
    label: str
    color: tuple[int, int, int]
    stem_ref: str
    gain: float = 1.0
    model_keyframes: tuple[PositionKeyframe, ...] = ()
    user_keyframes: tuple[PositionKeyframe, ...] = ()
    directional: bool = True


@dataclass(frozen=True)
class ListenerKeyframe:
    t: float
    position: Vec3
    orientation: Vec3  # yaw, pitch, roll in radians


@dataclass(frozen=True)
class ListenerPoseTrack:
    keyframes: tuple[ListenerKeyframe, ...] = ()


@dataclass(frozen=True)
class SceneProject:
    video: VideoMeta
    tracks: tuple[SourceTrack, ...]
    listener: ListenerPoseTrack
    layout_id: str
    intrinsics: CameraIntrinsics
    use_model_positions: bool = True

    def track(self, track_id: str) -> SourceTrack:
        for t in self.tracks:
            if t.id == track_id:
                return t
        raise UnknownTrack(track_id)


@dataclass(frozen=True)
class EditViolation:
    path: str
    message: str


# ---------------------------------------------------------------------------
# canonical JSON


def _canon(value, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if value is True or value is False:
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format(value, ".6f"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(pad + "  ")
            _canon(item, out, indent + 1)
            out.append(",\n" if i + 1 < len(value) else "\n")
        out.append(pad + "]")
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, k in enumerate(keys):
            out.append(pad + "  " + json.dumps(k, ensure_ascii=False) + ": ")
            _canon(value[k], out, indent + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"not canonically serializable: {type(value)!r}")


def canonical_json(value) -> bytes:
    """Deterministic JSON bytes: sorted keys, floats at 6 decimals."""
    out: list[str] = []
    _canon(value, out, 0)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _kf_dict(kf: PositionKeyframe) -> dict:
    return {"t": float(kf.t), "p": [float(c) for c in kf.p], "origin": kf.origin}


def project_to_dict(p: SceneProject) -> dict:
    return {
        "video": {
            "width": p.video.width,
            "height": p.video.height,
            "fps": float(p.video.fps),
            "duration": float(p.video.duration),
        },
        "tracks": [
            {
                "id": t.id,
                "label": t.label,
                "color": list(t.color),
                "stem_ref": t.stem_ref,
                "gain": float(t.gain),
                "model_keyframes": [_kf_dict(k) for k in t.model_keyframes],
                "user_keyframes": [_kf_dict(k) for k in t.user_keyframes],
                "directional": t.directional,
            }
            for t in p.tracks
        ],
        "listener": {
            "keyframes": [
                {
                    "t": float(k.t),
                    "position": [float(c) for c in k.position],
                    "orientation": [float(c) for c in k.orientation],
                }
                for k in p.listener.keyframes
            ]
        },
        "layout": p.layout_id,
        "intrinsics": {
            "width": p.intrinsics.width,
            "height": p.intrinsics.height,
            "focal_px": float(p.intrinsics.focal_px),
            "assumed_hfov": float(p.intrinsics.assumed_hfov),
        },
        "use_model_positions": p.use_model_positions,
    }


def save_project(p: SceneProject) -> bytes:
    """Serialize to the canonical project file form."""
    return canonical_json(project_to_dict(p))


# ---------------------------------------------------------------------------
# parsing


def _want(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(where, f"expected number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(where, f"expected integer, got {type(value).__name__}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise SchemaError(where, f"expected boolean, got {type(value).__name__}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise SchemaError(where, f"expected string, got {type(value).__name__}")
        return value
    if kind in (list, dict):
        if not isinstance(value, kind):
            raise SchemaError(where, f"expected {kind.__name__}, got {type(value).__name__}")
        return value
    raise AssertionError(kind)


def _vec3(obj: dict, key: str, path: str) -> Vec3:
    raw = _want(obj, key, list, path)
    where = f"{path}.{key}" if path else key
    if len(raw) != 3 or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in raw):
        raise SchemaError(where, "expected [x, y, z] numbers")
    return (float(raw[0]), float(raw[1]), float(raw[2]))


def _parse_keyframe(obj, path: str) -> PositionKeyframe:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected keyframe object")
    origin = _want(obj, "origin", str, path)
    if origin not in (ORIGIN_MODEL, ORIGIN_USER):
        raise SchemaError(f"{path}.origin", f"expected 'model' or 'user', got {origin!r}")
    return PositionKeyframe(t=_want(obj, "t", float, path), p=_vec3(obj, "p", path), origin=origin)


def _parse_track(obj, path: str) -> SourceTrack:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected track object")
    color_raw = _want(obj, "color", list, path)
    if len(color_raw) != 3 or any(isinstance(c, bool) or not isinstance(c, int) for c in color_raw):
        raise SchemaError(f"{path}.color", "expected [r, g, b] integers")
    return SourceTrack(
        id=_want(obj, "id", str, path),
        label=_want(obj, "label", str, path),
        color=(color_raw[0], color_raw[1], color_raw[2]),
        stem_ref=_want(obj, "stem_ref", str, path),
        gain=_want(obj, "gain", float, path),
        model_keyframes=tuple(
            _parse_keyframe(k, f"{path}.model_keyframes[{i}]")
            for i, k in enumerate(_want(obj, "model_keyframes", list, path))
        ),
        user_keyframes=tuple(
            _parse_keyframe(k, f"{path}.user_keyframes[{i}]")
            for i, k in enumerate(_want(obj, "user_keyframes", list, path))
        ),
        directional=_want(obj, "directional", bool, path),
    )


def load_project(data: bytes | str) -> SceneProject:
    """Parse and validate a project file.

    Unknown fields are ignored so older engines can open newer files.
    Raises ParseError for malformed JSON, SchemaError for missing or
    mistyped fields, InvariantError when values break document invariants.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"not UTF-8: {e}") from e
    try:
        root = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from e
    if not isinstance(root, dict):
        raise SchemaError("", "top level must be an object")

    video_raw = _want(root, "video", dict, "")
    video = VideoMeta(
        width=_want(video_raw, "width", int, "video"),
        height=_want(video_raw, "height", int, "video"),
        fps=_want(video_raw, "fps", float, "video"),
        duration=_want(video_raw, "duration", float, "video"),
    )
    tracks = tuple(
        _parse_track(t, f"tracks[{i}]") for i, t in enumerate(_want(root, "tracks", list, ""))
    )
    listener_raw = _want(root, "listener", dict, "")
    listener = ListenerPoseTrack(
        keyframes=tuple(
            ListenerKeyframe(
                t=_want(k, "t", float, f"listener.keyframes[{i}]"),
                position=_vec3(k, "position", f"listener.keyframes[{i}]"),
                orientation=_vec3(k, "orientation", f"listener.keyframes[{i}]"),
            )
            for i, k in enumerate(_want(listener_raw, "keyframes", list, "listener"))
        )
    )
    intr_raw = _want(root, "intrinsics", dict, "")
    intrinsics = CameraIntrinsics(
        width=_want(intr_raw, "width", int, "intrinsics"),
        height=_want(intr_raw, "height", int, "intrinsics"),
        focal_px=_want(intr_raw, "focal_px", float, "intrinsics"),
        assumed_hfov=_want(intr_raw, "assumed_hfov", float, "intrinsics"),
    )
    project = SceneProject(
        video=video,
        tracks=tracks,
        listener=listener,
        layout_id=_want(root, "layout", str, ""),
        intrinsics=intrinsics,
        use_model_positions=_want(root, "use_model_positions", bool, ""),
    )
    violations = validate(project)
    if violations:
        raise InvariantError("; ".join(f"{v.path}: {v.message}" for v in violations))
    return project


# ---------------------------------------------------------------------------
# validation


def _check_keyframes(kfs, duration: float, path: str, out: list[EditViolation]) -> None:
    prev_t = None
    for i, kf in enumerate(kfs):
        here = f"{path}[{i}]"
        if not math.isfinite(kf.t) or kf.t < 0:
            out.append(EditViolation(f"{here}.t", f"time must be finite and >= 0, got {kf.t}"))
        elif kf.t > duration:
            out.append(EditViolation(f"{here}.t", f"time {kf.t} beyond duration {duration}"))
        if prev_t is not None and math.isfinite(kf.t) and not kf.t > prev_t:
            out.append(EditViolation(f"{here}.t", f"times must be strictly ascending ({kf.t} after {prev_t})"))
        if any(not math.isfinite(c) for c in kf.p):
            out.append(EditViolation(f"{here}.p", "position components must be finite"))
        prev_t = kf.t


def validate(p: SceneProject) -> list[EditViolation]:
    """Return all invariant violations, empty when the project is valid."""
    out: list[EditViolation] = []
    if not (math.isfinite(p.video.duration) and p.video.duration > 0):
        out.append(EditViolation("video.duration", f"duration must be > 0, got {p.video.duration}"))
    if p.layout_id not in LAYOUT_IDS:
        out.append(EditViolation("layout", f"unknown layout {p.layout_id!r}"))
    if p.intrinsics.width <= 0 or p.intrinsics.height <= 0 or not p.intrinsics.focal_px > 0:
        out.append(EditViolation("intrinsics", "width, height and focal_px must be positive"))

    seen_ids: set[str] = set()
    for i, t in enumerate(p.tracks):
        if t.id in seen_ids:
            out.append(EditViolation("tracks", f"duplicate track id {t.id!r}"))
        seen_ids.add(t.id)
        if not (math.isfinite(t.gain) and 0 <= t.gain <= GAIN_MAX):
            out.append(EditViolation(f"tracks[{i}].gain", f"gain must be in [0, {GAIN_MAX}], got {t.gain}"))
        if any(not 0 <= c <= 255 for c in t.color):
            out.append(EditViolation(f"tracks[{i}].color", f"color channels must be in [0, 255], got {t.color}"))
        _check_keyframes(t.model_keyframes, p.video.duration, f"tracks[{i}].model_keyframes", out)
        _check_keyframes(t.user_keyframes, p.video.duration, f"tracks[{i}].user_keyframes", out)

    prev_t = None
    for i, kf in enumerate(p.listener.keyframes):
        here = f"listener.keyframes[{i}]"
        if prev_t is not None and not kf.t > prev_t:
            out.append(EditViolation(f"{here}.t", f"times must be strictly ascending ({kf.t} after {prev_t})"))
        if any(not math.isfinite(c) for c in kf.position) or any(
            not math.isfinite(c) for c in kf.orientation
        ):
            out.append(EditViolation(here, "pose components must be finite"))
        prev_t = kf.t
    return out


# ---------------------------------------------------------------------------
# edit operations


def _upsert_sorted(
    kfs: tuple[PositionKeyframe, ...], kf: PositionKeyframe
) -> tuple[PositionKeyframe, ...]:
    times = [k.t for k in kfs]
    i = bisect.bisect_left(times, kf.t)
    if i < len(kfs) and kfs[i].t == kf.t:
        return kfs[:i] + (kf,) + kfs[i + 1 :]
    return kfs[:i] + (kf,) + kfs[i:]


def upsert_keyframe(p: SceneProject, track_id: str, kf: PositionKeyframe) -> SceneProject:
    """Insert or replace one keyframe, keeping the list sorted by time.

    A keyframe whose ``t`` already exists replaces the old one. User-origin
    keyframes land in ``user_keyframes``, model-origin in ``model_keyframes``.
    """
    track = p.track(track_id)
    if not math.isfinite(kf.t) or any(not math.isfinite(c) for c in kf.p):
        raise NonFiniteValue(f"keyframe for {track_id!r} has non-finite components")
    if kf.origin == ORIGIN_USER:
        track = replace(track, user_keyframes=_upsert_sorted(track.user_keyframes, kf))
    else:
        track = replace(track, model_keyframes=_upsert_sorted(track.model_keyframes, kf))
    return replace(p, tracks=tuple(track if t.id == track_id else t for t in p.tracks))


def remove_keyframe(p: SceneProject, track_id: str, t: float, origin: str) -> SceneProject:
    """Remove the keyframe at exactly time ``t`` from one origin list.

    Removing a time that is not present is a no-op, so deletes are idempotent.
    """
    track = p.track(track_id)
    if origin == ORIGIN_USER:
        kept = tuple(k for k in track.user_keyframes if k.t != t)
        track = replace(track, user_keyframes=kept)
    else:
        kept = tuple(k for k in track.model_keyframes if k.t != t)
        track = replace(track, model_keyframes=kept)
    return replace(p, tracks=tuple(track if t2.id == track_id else t2 for t2 in p.tracks))


_TRACK_PROPERTIES = ("label", "gain", "color", "stem_ref")


def set_track_property(p: SceneProject, track_id: str, prop: str, value) -> SceneProject:
    """Change one track field; everything else (keyframes included) is untouched."""
    track = p.track(track_id)
    if prop == "label":
        if not isinstance(value, str):
            raise InvalidValue(f"label must be a string, got {type(value).__name__}")
        track = replace(track, label=value)
    elif prop == "gain":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidValue(f"gain must be a number, got {type(value).__name__}")
        gain = float(value)
        if not (math.isfinite(gain) and 0 <= gain <= GAIN_MAX):
            raise InvalidValue(f"gain must be in [0, {GAIN_MAX}], got {gain}")
        track = replace(track, gain=gain)
    elif prop == "color":
        try:
            r, g, b = value
            color = (int(r), int(g), int(b))
        except (TypeError, ValueError):
            raise InvalidValue("color must be an [r, g, b] integer triple") from None
        if any(not 0 <= c <= 255 for c in color):
            raise InvalidValue(f"color channels must be in [0, 255], got {color}")
        track = replace(track, color=color)
    elif prop == "stem_ref":
        if not isinstance(value, str):
            raise InvalidValue(f"stem_ref must be a string, got {type(value).__name__}")
        track = replace(track, stem_ref=value)
    else:
        raise InvalidValue(f"unknown property {prop!r}, expected one of {_TRACK_PROPERTIES}")
    return replace(p, tracks=tuple(track if t.id == track_id else t for t in p.tracks))


def set_listener_keyframe(
    p: SceneProject, t: float, position: Vec3, orientation: Vec3
) -> SceneProject:
    """Insert or replace a listener pose keyframe at time ``t``."""
    if any(not math.isfinite(c) for c in (t, *position, *orientation)):
        raise NonFiniteValue("listener pose has non-finite components")
    kf = ListenerKeyframe(t=t, position=position, orientation=orientation)
    kfs = p.listener.keyframes
    times = [k.t for k in kfs]
    i = bisect.bisect_left(times, t)
    if i < len(kfs) and kfs[i].t == t:
        new = kfs[:i] + (kf,) + kfs[i + 1 :]
    else:
        new = kfs[:i] + (kf,) + kfs[i:]
    return replace(p, listener=ListenerPoseTrack(keyframes=new))


def empty_project(
    width: int = 1920,
    height: int = 1080,
    fps: float = 30.0,
    duration: float = 1.0,
    layout_id: str = "stereo",
) -> SceneProject:
    """Smallest valid project: zero tracks, listener at origin."""
    from .geometry import intrinsics_from_fov

    return SceneProject(
        video=VideoMeta(width=width, height=height, fps=fps, duration=duration),
        tracks=(),
        listener=ListenerPoseTrack(
            keyframes=(ListenerKeyframe(t=0.0, position=(0.0, 0.0, 0.0), orientation=(0.0, 0.0, 0.0)),)
        ),
        layout_id=layout_id,
        intrinsics=intrinsics_from_fov(width, height, math.radians(60.0)),
        use_model_positions=True,
    )
