"""Annotation bundle ingest: detections to tracks, stems to objects.

A bundle (``.bundle.json``) carries per-frame detections with relative
depths plus separated audio stems with tag hypotheses. Ingest groups the
detections into per-object tracks, lifts them to 3D model keyframes, binds
each stem to the visual track whose category name matches its best tag
(through a synonym table, since audio-tag and detector vocabularies
differ), and emits the default project a user then repairs and customizes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InvariantError, ParseError, SchemaError
from .geometry import CameraIntrinsics, backproject, intrinsics_from_fov
from .scene import (
    ListenerKeyframe,
    ListenerPoseTrack,
    PositionKeyframe,
    SceneProject,
    SourceTrack,
    VideoMeta,
)
from .wav import AudioClip, read_wav

AMBIENT = "AMBIENT"

# Relative monocular depth is scale-free; map the clip's observed range onto
# a perceptually useful band before backprojection.
DEPTH_NEAR_M = 0.5
DEPTH_FAR_M = 10.0

TRACK_PALETTE = (
    (230, 57, 70),
    (69, 123, 157),
    (233, 196, 106),
    (42, 157, 143),
    (244, 162, 97),
    (38, 70, 83),
    (148, 113, 192),
    (231, 111, 81),
)


@dataclass(frozen=True)
class Detection:
    label: str
    bbox: tuple[float, float, float, float]  # x, y, w, h in pixels
    center_depth: float  # relative units, larger is farther

    @property
    def center(self) -> tuple[float, float]:
        x, y, w, h = self.bbox
        return (x + w / 2.0, y + h / 2.0)


@dataclass(frozen=True)
class FrameAnnotations:
    t: float
    detections: tuple[Detection, ...]


@dataclass(frozen=True)
class StemInfo:
    stem_id: str
    file: str  # path relative to the bundle file
    tags: tuple[tuple[str, float], ...]  # (label, confidence), as produced


@dataclass(frozen=True)
class AnnotationBundle:
    video: VideoMeta
    frames: tuple[FrameAnnotations, ...]
    stems: tuple[StemInfo, ...]


@dataclass(frozen=True)
class StemBinding:
    stem_id: str
    track_label: str  # AMBIENT when no visual track matched
    matched_confidence: float
    track_id: str | None = None


@dataclass(frozen=True)
class TrackSkeleton:
    """Visual object track before any audio is attached."""

    track_id: str
    label: str
    model_keyframes: tuple[PositionKeyframe, ...]


# ---------------------------------------------------------------------------
# parsing


def _num(obj: dict, key: str, path: str) -> float:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}", f"expected number, got {type(v).__name__}")
    return float(v)


def _str(obj: dict, key: str, path: str) -> str:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    v = obj[key]
    if not isinstance(v, str):
        raise SchemaError(f"{path}.{key}", f"expected string, got {type(v).__name__}")
    return v


def _list(obj: dict, key: str, path: str) -> list:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    v = obj[key]
    if not isinstance(v, list):
        raise SchemaError(f"{path}.{key}", f"expected list, got {type(v).__name__}")
    return v


def parse_bundle(data: bytes | str) -> AnnotationBundle:
    """Parse and validate a ``.bundle.json`` document."""
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
    if "video" not in root or not isinstance(root["video"], dict):
        raise SchemaError("video", "missing video object")
    vm = root["video"]
    video = VideoMeta(
        width=int(_num(vm, "width", "video")),
        height=int(_num(vm, "height", "video")),
        fps=_num(vm, "fps", "video"),
        duration=_num(vm, "duration", "video"),
    )

    frames = []
    for i, fr in enumerate(_list(root, "frames", "")):
        path = f"frames[{i}]"
        if not isinstance(fr, dict):
            raise SchemaError(path, "expected frame object")
        detections = []
        for j, det in enumerate(_list(fr, "detections", path)):
            dpath = f"{path}.detections[{j}]"
            if not isinstance(det, dict):
                raise SchemaError(dpath, "expected detection object")
            bbox_raw = _list(det, "bbox", dpath)
            if len(bbox_raw) != 4 or any(
                isinstance(c, bool) or not isinstance(c, (int, float)) for c in bbox_raw
            ):
                raise SchemaError(f"{dpath}.bbox", "expected [x, y, w, h] numbers")
            detections.append(
                Detection(
                    label=_str(det, "label", dpath),
                    bbox=tuple(float(c) for c in bbox_raw),
                    center_depth=_num(det, "depth", dpath),
                )
            )
        frames.append(FrameAnnotations(t=_num(fr, "t", path), detections=tuple(detections)))

    stems = []
    for i, st in enumerate(_list(root, "stems", "")):
        path = f"stems[{i}]"
        if not isinstance(st, dict):
            raise SchemaError(path, "expected stem object")
        tags = []
        for j, tag in enumerate(_list(st, "tags", path)):
            tpath = f"{path}.tags[{j}]"
            if not isinstance(tag, dict):
                raise SchemaError(tpath, "expected tag object")
            tags.append((_str(tag, "label", tpath), _num(tag, "confidence", tpath)))
        stems.append(StemInfo(stem_id=_str(st, "id", path), file=_str(st, "file", path), tags=tuple(tags)))

    bundle = AnnotationBundle(video=video, frames=tuple(frames), stems=tuple(stems))
    _check_bundle(bundle)
    return bundle


def _check_bundle(b: AnnotationBundle) -> None:
    if not b.video.duration > 0:
        raise InvariantError(f"video.duration must be > 0, got {b.video.duration}")
    prev_t = None
    for i, fr in enumerate(b.frames):
        if not math.isfinite(fr.t) or fr.t < 0:
            raise InvariantError(f"frames[{i}].t must be finite and >= 0, got {fr.t}")
        if prev_t is not None and not fr.t > prev_t:
            raise InvariantError(f"frames[{i}].t: frame times must be ascending ({fr.t} after {prev_t})")
        prev_t = fr.t
        for j, det in enumerate(fr.detections):
            x, y, w, h = det.bbox
            if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > b.video.width or y + h > b.video.height:
                raise InvariantError(f"frames[{i}].detections[{j}].bbox outside image bounds: {det.bbox}")
            if not math.isfinite(det.center_depth) or det.center_depth < 0:
                raise InvariantError(f"frames[{i}].detections[{j}].depth must be finite and >= 0")
    seen = set()
    for i, stem in enumerate(b.stems):
        if stem.stem_id in seen:
            raise InvariantError(f"stems[{i}]: duplicate stem id {stem.stem_id!r}")
        seen.add(stem.stem_id)
        for j, (_, conf) in enumerate(stem.tags):
            if not 0.0 <= conf <= 1.0:
                raise InvariantError(f"stems[{i}].tags[{j}].confidence must be in [0, 1], got {conf}")


# ---------------------------------------------------------------------------
# synonym table


def load_synonyms(text: str) -> dict[str, str]:
    """Parse ``canonical: alias1, alias2`` lines into alias -> canonical."""
    table: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        canonical, _, aliases = line.partition(":")
        canonical = canonical.strip().lower()
        table[canonical] = canonical
        for alias in aliases.split(","):
            alias = alias.strip().lower()
            if alias:
                table[alias] = canonical
    return table


def default_synonyms() -> dict[str, str]:
    text = resources.files("auralis").joinpath("data/synonyms.txt").read_text("utf-8")
    return load_synonyms(text)


def normalize_label(label: str, synonyms: dict[str, str]) -> str:
    key = label.strip().lower()
    return synonyms.get(key, key)


# ---------------------------------------------------------------------------
# association and binding


def _depth_mapper(b: AnnotationBundle):
    values = [d.center_depth for fr in b.frames for d in fr.detections]
    if not values:
        return lambda rel: (DEPTH_NEAR_M + DEPTH_FAR_M) / 2.0
    lo, hi = min(values), max(values)
    if hi <= lo:
        return lambda rel: (DEPTH_NEAR_M + DEPTH_FAR_M) / 2.0
    scale = (DEPTH_FAR_M - DEPTH_NEAR_M) / (hi - lo)
    return lambda rel: DEPTH_NEAR_M + (rel - lo) * scale


def associate_tracks(b: AnnotationBundle, k: CameraIntrinsics) -> list[TrackSkeleton]:
    """Group detections into per-object tracks with 3D model keyframes.

    Instances of the same label are matched to existing tracks greedily by
    nearest bbox center, taking the closest pairs first; unmatched instances
    open new tracks. Bundles carry a handful of sources, so greedy matching
    is enough and any residual confusion is user-repairable. Ordering is
    deterministic: tracks appear in first-detection order.
    """
    to_meters = _depth_mapper(b)
    track_labels: list[str] = []
    track_centers: list[tuple[float, float]] = []
    track_keyframes: list[list[PositionKeyframe]] = []

    for fr in b.frames:
        by_label: dict[str, list[int]] = {}
        for idx, det in enumerate(fr.detections):
            by_label.setdefault(det.label, []).append(idx)
        for label, det_indexes in by_label.items():
            candidates = [ti for ti, lab in enumerate(track_labels) if lab == label]
            pairs = sorted(
                (
                    (math.dist(fr.detections[di].center, track_centers[ti]), di, ti)
                    for di in det_indexes
                    for ti in candidates
                ),
                key=lambda item: item[0],
            )
            used_d: set[int] = set()
            used_t: set[int] = set()
            assignment: dict[int, int] = {}
            for _, di, ti in pairs:
                if di in used_d or ti in used_t:
                    continue
                assignment[di] = ti
                used_d.add(di)
                used_t.add(ti)
            for di in det_indexes:
                det = fr.detections[di]
                ti = assignment.get(di)
                if ti is None:
                    ti = len(track_labels)
                    track_labels.append(label)
                    track_centers.append(det.center)
                    track_keyframes.append([])
                u, v = det.center
                p = backproject(u, v, to_meters(det.center_depth), k)
                track_centers[ti] = det.center
                track_keyframes[ti].append(PositionKeyframe(t=fr.t, p=p, origin="model"))

    counts: dict[str, int] = {}
    out = []
    for label, kfs in zip(track_labels, track_keyframes):
        counts[label] = counts.get(label, 0) + 1
        out.append(
            TrackSkeleton(
                track_id=f"{label}-{counts[label]}",
                label=label,
                model_keyframes=tuple(kfs),
            )
        )
    return out


def bind_stems(
    tracks: list[TrackSkeleton],
    stems: tuple[StemInfo, ...] | list[StemInfo],
    synonyms: dict[str, str] | None = None,
) -> list[StemBinding]:
    """Bind each stem to a visual track by normalized category name.

    Each stem contributes its highest-confidence tag; both that tag and the
    track labels normalize through the synonym table before comparing. A
    stem is bound at most once and a track receives at most one stem; when
    several tracks share a label, earlier tracks win. Stems with no match
    become AMBIENT (kept audible, center-front, no position).
    """
    if synonyms is None:
        synonyms = default_synonyms()
    bound_tracks: set[str] = set()
    out = []
    for stem in stems:
        if stem.tags:
            best_label, best_conf = max(stem.tags, key=lambda tag: tag[1])
            want = normalize_label(best_label, synonyms)
            target = next(
                (
                    t
                    for t in tracks
                    if t.track_id not in bound_tracks
                    and normalize_label(t.label, synonyms) == want
                ),
                None,
            )
        else:
            best_conf, target = 0.0, None
        if target is None:
            out.append(StemBinding(stem_id=stem.stem_id, track_label=AMBIENT, matched_confidence=0.0))
        else:
            bound_tracks.add(target.track_id)
            out.append(
                StemBinding(
                    stem_id=stem.stem_id,
                    track_label=target.label,
                    matched_confidence=best_conf,
                    track_id=target.track_id,
                )
            )
    return out


def build_default_project(
    b: AnnotationBundle,
    k: CameraIntrinsics | None = None,
    layout_id: str = "stereo",
    synonyms: dict[str, str] | None = None,
) -> SceneProject:
    """Assemble the default project: associated tracks joined with bindings.

    Visual tracks keep their model keyframes; tracks that won a stem point
    at it through ``stem_ref`` (the stem's file path, so a saved project can
    find its audio later). Unmatched stems become non-directional ambient
    tracks at unit gain. The listener starts at the origin with identity
    orientation and model positions enabled.
    """
    if k is None:
        k = intrinsics_from_fov(b.video.width, b.video.height, math.radians(60.0))
    skeletons = associate_tracks(b, k)
    bindings = bind_stems(skeletons, b.stems, synonyms)
    stem_by_track = {bd.track_id: bd for bd in bindings if bd.track_id is not None}
    stem_files = {s.stem_id: s.file for s in b.stems}

    tracks = []
    for i, sk in enumerate(skeletons):
        binding = stem_by_track.get(sk.track_id)
        tracks.append(
            SourceTrack(
                id=sk.track_id,
                label=sk.label,
                color=TRACK_PALETTE[i % len(TRACK_PALETTE)],
                stem_ref=stem_files[binding.stem_id] if binding else "",
                gain=1.0,
                model_keyframes=sk.model_keyframes,
                user_keyframes=(),
                directional=True,
            )
        )
    for binding in bindings:
        if binding.track_id is not None:
            continue
        stem = next(s for s in b.stems if s.stem_id == binding.stem_id)
        label = max(stem.tags, key=lambda tag: tag[1])[0] if stem.tags else stem.stem_id
        tracks.append(
            SourceTrack(
                id=f"ambient-{stem.stem_id}",
                label=label,
                color=TRACK_PALETTE[len(tracks) % len(TRACK_PALETTE)],
                stem_ref=stem.file,
                gain=1.0,
                model_keyframes=(),
                user_keyframes=(),
                directional=False,
            )
        )
    return SceneProject(
        video=b.video,
        tracks=tuple(tracks),
        listener=ListenerPoseTrack(
            keyframes=(
                ListenerKeyframe(t=0.0, position=(0.0, 0.0, 0.0), orientation=(0.0, 0.0, 0.0)),
            )
        ),
        layout_id=layout_id,
        intrinsics=k,
        use_model_positions=True,
    )


def load_stems(project_or_bundle_dir: Path, stem_refs: list[str]) -> dict[str, AudioClip]:
    """Read every referenced stem WAV relative to the document's directory."""
    stems: dict[str, AudioClip] = {}
    for ref in stem_refs:
        if not ref or ref in stems:
            continue
        stems[ref] = read_wav((project_or_bundle_dir / ref).read_bytes())
    return stems


def ingest_bundle(bundle_path: Path, layout_id: str = "stereo"):
    """Read a bundle file and its stems; return (project, stems).

    Audio errors (missing stem files, unsupported formats, mismatched rates)
    propagate to the caller.
    """
    bundle_path = Path(bundle_path)
    bundle = parse_bundle(bundle_path.read_bytes())
    project = build_default_project(bundle, layout_id=layout_id)
    stems = load_stems(bundle_path.parent, [t.stem_ref for t in project.tracks])
    rates = {clip.sample_rate for clip in stems.values()}
    if len(rates) > 1:
        from .errors import SampleRateMismatch

        raise SampleRateMismatch(f"stems use multiple sample rates: {sorted(rates)}")
    return project, stems
