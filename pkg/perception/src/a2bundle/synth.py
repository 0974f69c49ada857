"""Synthetic bundle generation: scripted objects with known ground truth.

A synth spec scripts each sounding object as a linear path through the
frame plus a simple sound (pure tone or seeded noise). The emitted bundle's
detections follow the scripted paths exactly, so downstream association and
binding can be tested against values known by construction, with no model
in the loop. Output is deterministic for a fixed seed, byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .wavout import write_mono_wav


class InvalidSpec(Exception):
    pass


@dataclass(frozen=True)
class SoundSpec:
    kind: str  # "tone" | "noise" | "silence"
    freq: float = 440.0
    level: float = 0.4


@dataclass(frozen=True)
class ObjectSpec:
    label: str
    start_center: tuple[float, float]
    end_center: tuple[float, float]
    depth: tuple[float, float]  # relative depth at start and end
    size: tuple[float, float]  # bbox width, height px
    sound: SoundSpec
    tag: str
    confidence: float = 0.9


@dataclass(frozen=True)
class AmbientSpec:
    stem_id: str
    sound: SoundSpec
    tag: str
    confidence: float = 0.5


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    fps: float
    duration: float
    objects: tuple[ObjectSpec, ...]
    ambient: tuple[AmbientSpec, ...] = ()
    seed: int = 0
    sample_rate: int = 48000
    annotation_fps: float = 4.0


def _sound(obj: dict, path: str) -> SoundSpec:
    raw = obj.get("sound")
    if not isinstance(raw, dict) or raw.get("kind") not in ("tone", "noise", "silence"):
        raise InvalidSpec(f"{path}.sound must be tone, noise or silence")
    return SoundSpec(
        kind=raw["kind"],
        freq=float(raw.get("freq", 440.0)),
        level=float(raw.get("level", 0.4)),
    )


def parse_spec(data: bytes | str) -> SynthSpec:
    try:
        root = json.loads(data)
    except json.JSONDecodeError as e:
        raise InvalidSpec(f"malformed JSON: {e}") from e
    if not isinstance(root, dict) or not isinstance(root.get("video"), dict):
        raise InvalidSpec("spec must be an object with a 'video' section")
    video = root["video"]
    try:
        objects = []
        for i, obj in enumerate(root.get("objects", [])):
            objects.append(
                ObjectSpec(
                    label=str(obj["label"]),
                    start_center=(float(obj["start_center"][0]), float(obj["start_center"][1])),
                    end_center=(float(obj["end_center"][0]), float(obj["end_center"][1])),
                    depth=(float(obj["depth"][0]), float(obj["depth"][1])),
                    size=(float(obj["size"][0]), float(obj["size"][1])),
                    sound=_sound(obj, f"objects[{i}]"),
                    tag=str(obj["tag"]),
                    confidence=float(obj.get("confidence", 0.9)),
                )
            )
        ambient = []
        for i, amb in enumerate(root.get("ambient", [])):
            ambient.append(
                AmbientSpec(
                    stem_id=str(amb.get("id", f"ambient-{i}")),
                    sound=_sound(amb, f"ambient[{i}]"),
                    tag=str(amb["tag"]),
                    confidence=float(amb.get("confidence", 0.5)),
                )
            )
        spec = SynthSpec(
            width=int(video["width"]),
            height=int(video["height"]),
            fps=float(video["fps"]),
            duration=float(video["duration"]),
            objects=tuple(objects),
            ambient=tuple(ambient),
            seed=int(root.get("seed", 0)),
            sample_rate=int(root.get("sample_rate", 48000)),
            annotation_fps=float(root.get("annotation_fps", 4.0)),
        )
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise InvalidSpec(f"bad spec field: {e}") from e
    if spec.duration <= 0 or spec.annotation_fps <= 0:
        raise InvalidSpec("duration and annotation_fps must be positive")
    if spec.sample_rate not in (44100, 48000):
        raise InvalidSpec(f"sample_rate must be 44100 or 48000, got {spec.sample_rate}")
    return spec


def _lerp(a: float, b: float, alpha: float) -> float:
    return a + (b - a) * alpha


def _clamped_bbox(spec: SynthSpec, obj: ObjectSpec, alpha: float):
    w, h = obj.size
    cx = _lerp(obj.start_center[0], obj.end_center[0], alpha)
    cy = _lerp(obj.start_center[1], obj.end_center[1], alpha)
    # Keep the box inside the frame; centers near an edge slide inward.
    cx = min(max(cx, w / 2.0), spec.width - w / 2.0)
    cy = min(max(cy, h / 2.0), spec.height - h / 2.0)
    return [cx - w / 2.0, cy - h / 2.0, w, h]


def _render_sound(sound: SoundSpec, spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    n = round(spec.duration * spec.sample_rate)
    if sound.kind == "tone":
        t = np.arange(n) / spec.sample_rate
        return sound.level * np.sin(2 * math.pi * sound.freq * t)
    if sound.kind == "noise":
        return np.clip(sound.level * rng.standard_normal(n), -1.0, 1.0)
    return np.zeros(n)


def synth_fixture(spec: SynthSpec, out_dir: Path, name: str = "fixture") -> Path:
    """Write ``<name>.bundle.json`` plus stem WAVs; return the bundle path.

    Ground truth by construction: frame k (at k / annotation_fps seconds)
    carries each object's bbox centered exactly on its linear path. Stems
    are rendered in spec order from one seeded generator, so identical specs
    produce byte-identical trees.
    """
    out_dir = Path(out_dir)
    (out_dir / "stems").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    frame_count = int(math.floor(spec.duration * spec.annotation_fps)) + 1
    frames = []
    for k in range(frame_count):
        t = min(k / spec.annotation_fps, spec.duration)
        alpha = t / spec.duration
        detections = [
            {
                "label": obj.label,
                "bbox": _clamped_bbox(spec, obj, alpha),
                "depth": _lerp(obj.depth[0], obj.depth[1], alpha),
            }
            for obj in spec.objects
        ]
        frames.append({"t": t, "detections": detections})

    stems = []
    used_ids = set()
    for i, obj in enumerate(spec.objects):
        stem_id = f"{obj.label}-{i}"
        used_ids.add(stem_id)
        file_ref = f"stems/{stem_id}.wav"
        (out_dir / file_ref).write_bytes(
            write_mono_wav(_render_sound(obj.sound, spec, rng), spec.sample_rate)
        )
        stems.append({"id": stem_id, "file": file_ref, "tags": [{"label": obj.tag, "confidence": obj.confidence}]})
    for amb in spec.ambient:
        if amb.stem_id in used_ids:
            raise InvalidSpec(f"duplicate stem id {amb.stem_id!r}")
        used_ids.add(amb.stem_id)
        file_ref = f"stems/{amb.stem_id}.wav"
        (out_dir / file_ref).write_bytes(
            write_mono_wav(_render_sound(amb.sound, spec, rng), spec.sample_rate)
        )
        stems.append({"id": amb.stem_id, "file": file_ref, "tags": [{"label": amb.tag, "confidence": amb.confidence}]})

    bundle = {
        "video": {
            "width": spec.width,
            "height": spec.height,
            "fps": spec.fps,
            "duration": spec.duration,
        },
        "frames": frames,
        "stems": stems,
    }
    path = out_dir / f"{name}.bundle.json"
    path.write_text(json.dumps(bundle, indent=2, sort_keys=True) + "\n")
    return path
