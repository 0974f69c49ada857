import json
import math
import shutil
from pathlib import Path

import numpy as np
import pytest

from auralis.geometry import intrinsics_from_fov
from auralis.scene import (
    ListenerKeyframe,
    ListenerPoseTrack,
    PositionKeyframe,
    SceneProject,
    SourceTrack,
    VideoMeta,
)
from auralis.wav import AudioClip, clip_to_buffer, write_wav

DATA_DIR = Path(__file__).parent / "data"


def tone(freq: float, duration: float, rate: int = 48000, level: float = 0.5) -> AudioClip:
    t = np.arange(round(duration * rate)) / rate
    return AudioClip(sample_rate=rate, samples=(level * np.sin(2 * np.pi * freq * t)))


def noise(duration: float, rate: int = 48000, level: float = 0.2, seed: int = 11) -> AudioClip:
    rng = np.random.default_rng(seed)
    n = round(duration * rate)
    return AudioClip(sample_rate=rate, samples=np.clip(level * rng.standard_normal(n), -1, 1))


def make_track(
    track_id: str = "t1",
    label: str = "violin",
    stem_ref: str = "stems/a.wav",
    gain: float = 1.0,
    model_kfs=(),
    user_kfs=(),
    directional: bool = True,
    color=(230, 57, 70),
) -> SourceTrack:
    return SourceTrack(
        id=track_id,
        label=label,
        color=color,
        stem_ref=stem_ref,
        gain=gain,
        model_keyframes=tuple(PositionKeyframe(t=t, p=p, origin="model") for t, p in model_kfs),
        user_keyframes=tuple(PositionKeyframe(t=t, p=p, origin="user") for t, p in user_kfs),
        directional=directional,
    )


def make_project(
    tracks=(),
    duration: float = 4.0,
    layout_id: str = "stereo",
    listener_kfs=((0.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),),
    use_model_positions: bool = True,
    width: int = 1920,
    height: int = 1080,
) -> SceneProject:
    return SceneProject(
        video=VideoMeta(width=width, height=height, fps=30.0, duration=duration),
        tracks=tuple(tracks),
        listener=ListenerPoseTrack(
            keyframes=tuple(
                ListenerKeyframe(t=t, position=p, orientation=o) for t, p, o in listener_kfs
            )
        ),
        layout_id=layout_id,
        intrinsics=intrinsics_from_fov(width, height, math.radians(60.0)),
        use_model_positions=use_model_positions,
    )


DUET_BUNDLE = {
    "video": {"width": 1280, "height": 720, "fps": 30.0, "duration": 2.0},
    "frames": [
        {
            "t": 0.0,
            "detections": [
                {"label": "violin", "bbox": [200, 260, 160, 240], "depth": 0.35},
                {"label": "flute", "bbox": [820, 280, 140, 220], "depth": 0.55},
            ],
        },
        {
            "t": 1.0,
            "detections": [
                {"label": "violin", "bbox": [240, 260, 160, 240], "depth": 0.38},
                {"label": "flute", "bbox": [800, 280, 140, 220], "depth": 0.52},
            ],
        },
        {
            "t": 2.0,
            "detections": [
                {"label": "violin", "bbox": [280, 260, 160, 240], "depth": 0.42},
                {"label": "flute", "bbox": [780, 280, 140, 220], "depth": 0.50},
            ],
        },
    ],
    "stems": [
        {
            "id": "stem-0",
            "file": "stems/violin.wav",
            "tags": [{"label": "fiddle", "confidence": 0.91}, {"label": "music", "confidence": 0.42}],
        },
        {
            "id": "stem-1",
            "file": "stems/flute.wav",
            "tags": [{"label": "flute", "confidence": 0.88}],
        },
        {
            "id": "stem-2",
            "file": "stems/noise.wav",
            "tags": [{"label": "wind noise", "confidence": 0.66}],
        },
    ],
}


def write_duet_fixture(root: Path) -> Path:
    """Write the duet bundle plus deterministic stems under ``root``."""
    (root / "stems").mkdir(parents=True, exist_ok=True)
    bundle_path = root / "duet.bundle.json"
    bundle_path.write_text(json.dumps(DUET_BUNDLE, indent=2))
    for name, clip in (
        ("violin.wav", tone(440.0, 2.0)),
        ("flute.wav", tone(660.0, 2.0)),
        ("noise.wav", noise(2.0)),
    ):
        (root / "stems" / name).write_bytes(write_wav(clip_to_buffer(clip), bit_depth=32))
    return bundle_path


@pytest.fixture(scope="session")
def duet_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("duet")
    write_duet_fixture(root)
    return root


@pytest.fixture(scope="session")
def project_fixture_dir(tmp_path_factory) -> Path:
    """The committed canonical project fixture with its stems materialized."""
    root = tmp_path_factory.mktemp("projfix")
    shutil.copy(DATA_DIR / "project_fixture.auralis.json", root / "project_fixture.auralis.json")
    (root / "stems").mkdir()
    for name, clip in (("violin.wav", tone(440.0, 1.5)), ("flute.wav", tone(660.0, 1.5))):
        (root / "stems" / name).write_bytes(write_wav(clip_to_buffer(clip), bit_depth=32))
    return root
