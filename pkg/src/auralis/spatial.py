"""Per-channel gain computation and block-based multichannel rendering.

Gains combine three independent factors: the track's own gain slider, an
inverse distance attenuation, and a constant-power amplitude pan over the
layout's speaker ring. Rendering is block-based; per-channel gains ramp
linearly across each block from the previous block's end values to targets
sampled at the block's end, which keeps adjacent-sample steps bounded by
max|gain change| / block_size and kills audible zipper clicks on edits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBlock, SampleRateMismatch
from .geometry import direction_of, pose_at, position_at, to_listener_frame
from .scene import SceneProject, SourceTrack

log = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 1024
BLOCK_SIZE_MIN = 64
BLOCK_SIZE_MAX = 8192


@dataclass(frozen=True)
class SpeakerLayout:
    """Ordered channel list; order matches the WAV channel order on export."""

    id: str
    channels: tuple[tuple[str, float | None], ...]  # (name, azimuth deg) or (name, None) for LFE

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    @property
    def directional_indexes(self) -> tuple[int, ...]:
        return tuple(i for i, (_, az) in enumerate(self.channels) if az is not None)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.channels)


MONO = SpeakerLayout("mono", (("M", 0.0),))
# Stereo azimuths span the pan-law domain [-90, 90]; rear content folds forward.
STEREO = SpeakerLayout("stereo", (("L", -90.0), ("R", 90.0)))
QUAD = SpeakerLayout("quad", (("FL", -45.0), ("FR", 45.0), ("RL", -135.0), ("RR", 135.0)))
FIVE_ONE = SpeakerLayout(
    "five_one",
    (("FL", -30.0), ("FR", 30.0), ("C", 0.0), ("LFE", None), ("RL", -110.0), ("RR", 110.0)),
)

LAYOUTS = {layout.id: layout for layout in (MONO, STEREO, QUAD, FIVE_ONE)}


def get_layout(layout_id: str) -> SpeakerLayout:
    try:
        return LAYOUTS[layout_id]
    except KeyError:
        raise KeyError(f"unknown layout {layout_id!r}, expected one of {sorted(LAYOUTS)}") from None


@dataclass(frozen=True)
class DistanceParams:
    """Inverse-clamped attenuation: unity inside ref_distance, floor past max."""

    ref_distance: float = 1.0
    rolloff: float = 1.0
    max_distance: float = 10.0

    def __post_init__(self):
        if not self.ref_distance > 0:
            raise ValueError(f"ref_distance must be > 0, got {self.ref_distance}")
        if self.rolloff < 0:
            raise ValueError(f"rolloff must be >= 0, got {self.rolloff}")
        if self.max_distance < self.ref_distance:
            raise ValueError("max_distance must be >= ref_distance")


DEFAULT_DISTANCE = DistanceParams()


# ---------------------------------------------------------------------------
# gain laws


def pan_gains(azimuth: float, layout: SpeakerLayout) -> np.ndarray:
    """Constant-power gains over the layout's directional channels.

    Mono gets everything. Stereo folds rear azimuths to the front and pans
    cos/sin over [-90, 90]. Ring layouts (quad, five_one) pan cos/sin between
    the adjacent speaker pair bracketing the azimuth, wrapping through the
    rear; an azimuth exactly on a speaker feeds only that speaker. The sum of
    squared gains is 1 everywhere. LFE is not part of the result.
    """
    directional = layout.directional_indexes
    if layout.id == "mono":
        return np.array([1.0])
    if layout.id == "stereo":
        az = azimuth
        if az < -90.0:
            az = -180.0 - az
        elif az > 90.0:
            az = 180.0 - az
        x = (az + 90.0) / 180.0
        return np.array([math.cos(x * math.pi / 2.0), math.sin(x * math.pi / 2.0)])

    # Ring panning: speakers sorted by azimuth on [0, 360), pick the arc
    # containing the source azimuth.
    ring = sorted(
        ((layout.channels[i][1] % 360.0, pos) for pos, i in enumerate(directional)),
        key=lambda item: item[0],
    )
    az = azimuth % 360.0
    n = len(ring)
    gains = np.zeros(len(directional))
    for j in range(n):
        theta1, slot1 = ring[j]
        theta2, slot2 = ring[(j + 1) % n]
        span = (theta2 - theta1) % 360.0
        offset = (az - theta1) % 360.0
        if offset < span:
            alpha = offset / span
            gains[slot1] = math.cos(alpha * math.pi / 2.0)
            gains[slot2] = math.sin(alpha * math.pi / 2.0)
            return gains
    # Half-open arcs partition the circle; only float modulo edge cases
    # reach this. Land on the nearest speaker.
    slot = min(ring, key=lambda item: min((az - item[0]) % 360.0, (item[0] - az) % 360.0))[1]
    gains[slot] = 1.0
    return gains


def distance_gain(d: float, params: DistanceParams = DEFAULT_DISTANCE) -> float:
    """Inverse distance law, clamped to [ref_distance, max_distance]."""
    ref = params.ref_distance
    clamped = min(max(d, ref), params.max_distance)
    return ref / (ref + params.rolloff * (clamped - ref))


def source_channel_gains(
    track: SourceTrack,
    project: SceneProject,
    t: float,
    layout: SpeakerLayout,
    distance: DistanceParams = DEFAULT_DISTANCE,
) -> np.ndarray:
    """Full per-channel gain vector for one track at time ``t``.

    Directional tracks compose track gain x distance gain x pan gains from
    the track's listener-relative direction. Ambient tracks skip geometry
    and render center-front at track gain. LFE always gets 0.
    """
    gains = np.zeros(layout.channel_count)
    directional = layout.directional_indexes
    if not track.directional:
        gains[list(directional)] = track.gain * pan_gains(0.0, layout)
        return gains
    world = position_at(track, t, project.use_model_positions)
    pose = pose_at(project.listener, t)
    rel = direction_of(to_listener_frame(pose, world))
    g = track.gain * distance_gain(rel.distance, distance)
    gains[list(directional)] = g * pan_gains(rel.azimuth, layout)
    return gains


# ---------------------------------------------------------------------------
# block rendering


@dataclass
class RenderedBuffer:
    """Multichannel render plus the per-block channel meters."""

    sample_rate: int
    channel_count: int
    samples: np.ndarray  # (frames, channels) float64
    meter_frames: np.ndarray  # (blocks, channels) RMS
    block_size: int = DEFAULT_BLOCK_SIZE

    @property
    def frame_count(self) -> int:
        return self.samples.shape[0]


def block_meters(block: np.ndarray) -> np.ndarray:
    """Per-channel RMS over a (frames, channels) block."""
    if block.size == 0:
        raise EmptyBlock("cannot meter an empty block")
    return np.sqrt(np.mean(np.square(block), axis=0))


def renderable_tracks(project: SceneProject, stems: dict) -> list[SourceTrack]:
    """Tracks that can produce audio: a bound stem that is actually loaded.

    Directional tracks additionally need at least one keyframe in the
    effective timeline for the current toggle state; tracks without one are
    silent rather than fatal, so a half-edited scene still previews.
    """
    out = []
    for track in project.tracks:
        if not track.stem_ref or track.stem_ref not in stems:
            continue
        if track.directional:
            if project.use_model_positions:
                if not (track.model_keyframes or track.user_keyframes):
                    continue
            elif not track.user_keyframes:
                continue
        out.append(track)
    return out


def _check_rates(tracks, stems, sample_rate: int | None) -> int:
    rate = sample_rate
    for track in tracks:
        clip_rate = stems[track.stem_ref].sample_rate
        if rate is None:
            rate = clip_rate
        elif clip_rate != rate:
            raise SampleRateMismatch(
                f"stem {track.stem_ref!r} is {clip_rate} Hz, expected {rate} Hz"
            )
    return rate if rate is not None else 48000


def _stem_slice(samples: np.ndarray, start: int, count: int) -> np.ndarray:
    # Reads past the stem's end are silence.
    out = np.zeros(count)
    if start >= len(samples) or start + count <= 0:
        return out
    lo = max(start, 0)
    hi = min(start + count, len(samples))
    out[lo - start : hi - start] = samples[lo:hi]
    return out


def render_block(
    project: SceneProject,
    stems: dict,
    layout: SpeakerLayout,
    t0: float,
    frame_count: int,
    prev_gains: dict[str, np.ndarray] | None,
    distance: DistanceParams = DEFAULT_DISTANCE,
    sample_rate: int | None = None,
) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Render one block starting at ``t0`` and return (block, meters, gains).

    Target gains are evaluated once at the block's end time; each source's
    per-channel gain ramps linearly per sample from its previous value there.
    A source without previous state starts at its gains evaluated at ``t0``,
    so a static scene renders with exactly constant gains. The returned gain
    dict feeds the next block to keep gain trajectories continuous.
    """
    if frame_count < 1 or frame_count > BLOCK_SIZE_MAX:
        raise ValueError(f"frame_count must be in [1, {BLOCK_SIZE_MAX}], got {frame_count}")
    tracks = renderable_tracks(project, stems)
    rate = _check_rates(tracks, stems, sample_rate)
    t_end = t0 + frame_count / rate
    start_frame = round(t0 * rate)

    block = np.zeros((frame_count, layout.channel_count))
    ramp = np.arange(1, frame_count + 1)[:, None] / frame_count
    new_gains: dict[str, np.ndarray] = {}
    for track in tracks:
        target = source_channel_gains(track, project, t_end, layout, distance)
        start = None if prev_gains is None else prev_gains.get(track.id)
        if start is None or start.shape != target.shape:
            # No usable history (new source, or the layout just changed its
            # channel count): start from the gains at the block start.
            start = source_channel_gains(track, project, t0, layout, distance)
        new_gains[track.id] = target
        gains = start[None, :] + (target - start)[None, :] * ramp
        stem = _stem_slice(stems[track.stem_ref].samples, start_frame, frame_count)
        block += stem[:, None] * gains
    return block, np.sqrt(np.mean(np.square(block), axis=0)), new_gains


def render_offline(
    project: SceneProject,
    stems: dict,
    layout: SpeakerLayout,
    block_size: int = DEFAULT_BLOCK_SIZE,
    distance: DistanceParams = DEFAULT_DISTANCE,
    sample_rate: int | None = None,
) -> RenderedBuffer:
    """Render the whole project duration block by block.

    Gain state threads across blocks, so the result is identical to a
    streamed preview of a static playhead run. Output is float and not
    limited; a peak above full scale is reported as a warning rather than
    clipped, which keeps rendering linear in the track gains.
    """
    if not BLOCK_SIZE_MIN <= block_size <= BLOCK_SIZE_MAX:
        raise ValueError(
            f"block_size must be in [{BLOCK_SIZE_MIN}, {BLOCK_SIZE_MAX}], got {block_size}"
        )
    tracks = renderable_tracks(project, stems)
    rate = _check_rates(tracks, stems, sample_rate)
    total = round(project.video.duration * rate)
    samples = np.zeros((total, layout.channel_count))
    meters = []
    gains: dict[str, np.ndarray] | None = None
    start = 0
    while start < total:
        count = min(block_size, total - start)
        block, rms, gains = render_block(
            project, stems, layout, start / rate, count, gains, distance, rate
        )
        samples[start : start + count] = block
        meters.append(rms)
        start += count
    meter_frames = np.array(meters) if meters else np.zeros((0, layout.channel_count))
    peak = float(np.max(np.abs(samples))) if total else 0.0
    if peak > 1.0:
        log.warning("render peak %.3f exceeds full scale; export is unclipped", peak)
    return RenderedBuffer(
        sample_rate=rate,
        channel_count=layout.channel_count,
        samples=samples,
        meter_frames=meter_frames,
        block_size=block_size,
    )
