"""Video analysis pipeline: detector, depth, separation and tagging adapters.

The pipeline is model-agnostic: each stage is a callable with a small
contract, and concrete checkpoints plug in behind those contracts so they
can be swapped as models rot. ``default_adapters`` tries to stand up real
pretrained models and raises ModelUnavailable when the environment cannot
provide them; tests and offline use inject fakes.

Stage contracts (all frames are HxWx3 uint8 RGB):
  detect(frame)        -> list of (label, (x, y, w, h), score)
  depth_map(frame)     -> HxW float array, larger is farther (relative)
  separate(samples, rate) -> list of mono float arrays (the stems)
  tag(samples, rate)   -> list of (label, confidence), best first
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .wavout import write_mono_wav


class ModelUnavailable(Exception):
    pass


class DecodeError(Exception):
    pass


@dataclass(frozen=True)
class AnalyzeConfig:
    sample_fps: float = 4.0  # annotation frames per second of video
    top_k_tags: int = 3
    min_score: float = 0.5
    sample_rate: int = 48000


@dataclass(frozen=True)
class Adapters:
    detect: Callable
    depth_map: Callable
    separate: Callable
    tag: Callable


def default_adapters() -> Adapters:
    """Stand up the default pretrained stages.

    Defaults (documented, not pinned): a COCO-trained torchvision detector,
    MiDaS small for relative depth, HDemucs for separation and PANNs for
    tagging. Every stage needs its checkpoint reachable (package installed
    and weights cached or downloadable); the first stage that cannot load
    raises ModelUnavailable naming itself. Offline environments inject
    adapters instead, which is also how the test suite runs.
    """
    try:
        import torch
        import torchvision

        det_weights = torchvision.models.detection.FasterRCNN_ResNet50_FPN_Weights.DEFAULT
        det_model = torchvision.models.detection.fasterrcnn_resnet50_fpn(weights=det_weights)
        det_model.eval()
        categories = det_weights.meta["categories"]
    except Exception as e:  # missing package, no weights cache, no network
        raise ModelUnavailable(f"object detector unavailable: {e}") from e

    try:
        midas = torch.hub.load("intel-isl/MiDaS", "MiDaS_small")
        midas.eval()
        transforms = torch.hub.load("intel-isl/MiDaS", "transforms").small_transform
    except Exception as e:
        raise ModelUnavailable(f"depth estimator unavailable: {e}") from e

    try:
        import torchaudio

        demucs = torchaudio.pipelines.HDEMUCS_HIGH_MUSDB_PLUS.get_model()
        demucs.eval()
    except Exception as e:
        raise ModelUnavailable(f"source separator unavailable: {e}") from e

    try:
        from panns_inference import AudioTagging

        tagger = AudioTagging(checkpoint_path=None, device="cpu")
    except Exception as e:
        raise ModelUnavailable(f"audio tagger unavailable: {e}") from e

    def detect(frame: np.ndarray):
        tensor = torch.from_numpy(frame).permute(2, 0, 1).float() / 255.0
        with torch.no_grad():
            result = det_model([tensor])[0]
        out = []
        for box, label, score in zip(result["boxes"], result["labels"], result["scores"]):
            x0, y0, x1, y1 = (float(v) for v in box)
            out.append((categories[int(label)], (x0, y0, x1 - x0, y1 - y0), float(score)))
        return out

    def depth_map(frame: np.ndarray):
        with torch.no_grad():
            prediction = midas(transforms(frame))
        inverse = prediction.squeeze().numpy()  # MiDaS emits inverse depth
        top = float(inverse.max())
        return (top - inverse) if top > 0 else inverse

    def separate(samples: np.ndarray, rate: int):
        with torch.no_grad():
            mix = torch.from_numpy(samples).float().reshape(1, 1, -1).repeat(1, 2, 1)
            sources = demucs(mix)[0].mean(dim=1)
        return [s.numpy() for s in sources]

    def tag(samples: np.ndarray, rate: int):
        clipwise, _ = tagger.inference(samples[None, :].astype("float32"))
        scores = clipwise[0]
        order = scores.argsort()[::-1][:10]
        return [(tagger.labels[i], float(scores[i])) for i in order]

    return Adapters(detect=detect, depth_map=depth_map, separate=separate, tag=tag)


def iter_video_frames(video_path: Path, sample_fps: float):
    """Yield (t_seconds, rgb_frame) at the requested sampling rate."""
    try:
        import cv2
    except ImportError as e:
        raise ModelUnavailable(f"opencv unavailable: {e}") from e
    cap = cv2.VideoCapture(str(video_path))
    if not cap.isOpened():
        raise DecodeError(f"cannot open video: {video_path}")
    fps = cap.get(cv2.CAP_PROP_FPS) or 0.0
    if fps <= 0:
        cap.release()
        raise DecodeError(f"video reports no frame rate: {video_path}")
    step = max(1, round(fps / sample_fps))
    index = 0
    try:
        while True:
            ok, frame = cap.read()
            if not ok:
                return
            if index % step == 0:
                yield index / fps, frame[:, :, ::-1].copy()  # BGR -> RGB
            index += 1
    finally:
        cap.release()


def video_meta(video_path: Path) -> dict:
    import cv2

    cap = cv2.VideoCapture(str(video_path))
    if not cap.isOpened():
        raise DecodeError(f"cannot open video: {video_path}")
    try:
        fps = cap.get(cv2.CAP_PROP_FPS) or 0.0
        frames = cap.get(cv2.CAP_PROP_FRAME_COUNT) or 0.0
        width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
        height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))
        if fps <= 0 or frames <= 0 or width <= 0 or height <= 0:
            raise DecodeError(f"video metadata unreadable: {video_path}")
        return {"width": width, "height": height, "fps": fps, "duration": frames / fps}
    finally:
        cap.release()


def _clamp_bbox(bbox, width: int, height: int):
    x, y, w, h = bbox
    x = min(max(x, 0.0), width - 1.0)
    y = min(max(y, 0.0), height - 1.0)
    w = max(min(w, width - x), 1.0)
    h = max(min(h, height - y), 1.0)
    return [x, y, w, h]


def analyze_frames(
    meta: dict,
    frames: Sequence[tuple[float, np.ndarray]],
    audio: np.ndarray | None,
    adapters: Adapters,
    config: AnalyzeConfig,
    out_dir: Path,
    name: str = "analysis",
) -> Path:
    """Run the pipeline over decoded frames and write bundle plus stems."""
    out_dir = Path(out_dir)
    (out_dir / "stems").mkdir(parents=True, exist_ok=True)

    frame_entries = []
    for t, frame in frames:
        depth = None
        detections = []
        for label, bbox, score in adapters.detect(frame):
            if score < config.min_score:
                continue
            if depth is None:
                depth = np.asarray(adapters.depth_map(frame), dtype=float)
            bbox = _clamp_bbox(bbox, meta["width"], meta["height"])
            cx = min(int(bbox[0] + bbox[2] / 2.0), depth.shape[1] - 1)
            cy = min(int(bbox[1] + bbox[3] / 2.0), depth.shape[0] - 1)
            detections.append(
                {"label": label, "bbox": bbox, "depth": float(max(depth[cy, cx], 0.0))}
            )
        frame_entries.append({"t": round(float(t), 6), "detections": detections})

    stems = []
    if audio is not None and len(audio):
        for i, stem in enumerate(adapters.separate(audio, config.sample_rate)):
            stem_id = f"stem-{i}"
            file_ref = f"stems/{stem_id}.wav"
            (out_dir / file_ref).write_bytes(
                write_mono_wav(np.asarray(stem, dtype=float), config.sample_rate)
            )
            tags = [
                {"label": label, "confidence": float(min(max(conf, 0.0), 1.0))}
                for label, conf in adapters.tag(stem, config.sample_rate)[: config.top_k_tags]
            ]
            stems.append({"id": stem_id, "file": file_ref, "tags": tags})

    bundle = {
        "video": {
            "width": meta["width"],
            "height": meta["height"],
            "fps": meta["fps"],
            "duration": meta["duration"],
        },
        "frames": frame_entries,
        "stems": stems,
    }
    path = out_dir / f"{name}.bundle.json"
    path.write_text(json.dumps(bundle, indent=2, sort_keys=True) + "\n")
    return path


def analyze_video(
    video_path: Path,
    out_dir: Path,
    config: AnalyzeConfig | None = None,
    adapters: Adapters | None = None,
    audio_path: Path | None = None,
) -> Path:
    """Analyze a video file into a bundle.

    The soundtrack arrives as a separate WAV (``audio_path``) when the
    container's audio cannot be demuxed locally; without it the bundle
    carries detections only.
    """
    config = config or AnalyzeConfig()
    video_path = Path(video_path)
    if not video_path.exists():
        raise FileNotFoundError(str(video_path))
    meta = video_meta(video_path)  # decode problems surface before model loading
    adapters = adapters or default_adapters()
    frames = list(iter_video_frames(video_path, config.sample_fps))

    audio = None
    if audio_path is not None:
        audio = _read_mono_wav(Path(audio_path), config.sample_rate)
    return analyze_frames(meta, frames, audio, adapters, config, out_dir, name=video_path.stem)


def _read_mono_wav(path: Path, want_rate: int) -> np.ndarray:
    import struct

    data = path.read_bytes()
    if data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise DecodeError(f"not a WAV file: {path}")
    pos = 12
    fmt = payload = None
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        if cid == b"fmt ":
            fmt = data[pos + 8 : pos + 8 + size]
        elif cid == b"data":
            payload = data[pos + 8 : pos + 8 + size]
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise DecodeError(f"missing fmt/data chunk: {path}")
    tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if rate != want_rate:
        raise DecodeError(f"audio is {rate} Hz, expected {want_rate}")
    if tag == 3 and bits == 32:
        flat = np.frombuffer(payload, dtype="<f4").astype(float)
    elif tag == 1 and bits == 16:
        flat = np.frombuffer(payload, dtype="<i2").astype(float) / 32768.0
    else:
        raise DecodeError(f"unsupported WAV format tag={tag} bits={bits}")
    frames = len(flat) // channels
    return flat[: frames * channels].reshape(frames, channels).mean(axis=1)
