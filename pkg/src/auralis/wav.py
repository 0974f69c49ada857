"""RIFF/WAVE reading and writing, bit-exact and dependency-free.

Stem input: PCM 16/24-bit or IEEE float 32-bit, 1-2 channels, 44.1/48 kHz;
multichannel stems downmix to mono by equal-weight average. Render output:
mono/stereo as plain PCM or float chunks (classic 44-byte header for the
supported depths), quad and 5.1 as WAVE_FORMAT_EXTENSIBLE with the standard
speaker masks. Channel order in the file always matches the SpeakerLayout
channel order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptFile, UnsupportedChannelCount, UnsupportedFormat, UnsupportedRate
from .spatial import RenderedBuffer

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# Speaker position bits (WAVEFORMATEXTENSIBLE dwChannelMask).
SPEAKER_FL = 0x01
SPEAKER_FR = 0x02
SPEAKER_FC = 0x04
SPEAKER_LFE = 0x08
SPEAKER_BL = 0x10
SPEAKER_BR = 0x20

CHANNEL_MASKS = {
    4: SPEAKER_FL | SPEAKER_FR | SPEAKER_BL | SPEAKER_BR,  # 0x33
    6: SPEAKER_FL | SPEAKER_FR | SPEAKER_FC | SPEAKER_LFE | SPEAKER_BL | SPEAKER_BR,  # 0x3F
}

# KSDATAFORMAT_SUBTYPE_{PCM,IEEE_FLOAT}: first 4 bytes are the format tag.
_SUBFORMAT_TAIL = b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"

SUPPORTED_RATES = (44100, 48000)


@dataclass(frozen=True)
class AudioClip:
    """One mono stem at a fixed rate, float samples nominally in [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class WavFrames:
    """Raw decode of any supported WAV: frames kept per channel."""

    sample_rate: int
    samples: np.ndarray  # (frames, channels) float64
    format_tag: int
    bits_per_sample: int
    channel_mask: int | None  # None unless WAVE_FORMAT_EXTENSIBLE


def _chunks(data: bytes):
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptFile("not a RIFF/WAVE file")
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise CorruptFile(f"truncated {cid!r} chunk")
        yield cid, body
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def read_wav_frames(data: bytes) -> WavFrames:
    """Decode a WAV file into per-channel float frames without mixing."""
    fmt = None
    payload = None
    for cid, body in _chunks(data):
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            payload = body
    if fmt is None or payload is None:
        raise CorruptFile("missing fmt or data chunk")
    if len(fmt) < 16:
        raise CorruptFile("fmt chunk too short")
    tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    mask = None
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise CorruptFile("extensible fmt chunk too short")
        _, mask = struct.unpack_from("<HI", fmt, 18)
        sub = fmt[24:40]
        if sub[2:] != _SUBFORMAT_TAIL:
            raise UnsupportedFormat("unknown extensible subformat")
        tag = struct.unpack_from("<H", sub, 0)[0]
    if tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedFormat(f"format tag 0x{tag:04x} (compressed codecs unsupported)")
    if channels < 1:
        raise CorruptFile("zero channels")

    if tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedFormat(f"{bits}-bit float unsupported")
        if len(payload) % 4:
            raise CorruptFile("float32 data not a multiple of 4 bytes")
        flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    elif bits == 16:
        if len(payload) % 2:
            raise CorruptFile("16-bit data not a multiple of 2 bytes")
        flat = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8)
        if len(raw) % 3:
            raise CorruptFile("24-bit data not a multiple of 3 bytes")
        raw = raw.reshape(-1, 3).astype(np.int32)
        value = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        value = np.where(value & 0x800000, value - 0x1000000, value)
        flat = value.astype(np.float64) / 8388608.0
    else:
        raise UnsupportedFormat(f"{bits}-bit PCM unsupported")
    frames = len(flat) // channels
    return WavFrames(
        sample_rate=rate,
        samples=flat[: frames * channels].reshape(frames, channels),
        format_tag=tag,
        bits_per_sample=bits,
        channel_mask=mask,
    )


def read_wav(data: bytes) -> AudioClip:
    """Read a stem file: 1-2 channels, averaged down to one mono clip."""
    frames = read_wav_frames(data)
    if frames.sample_rate not in SUPPORTED_RATES:
        raise UnsupportedRate(f"{frames.sample_rate} Hz (supported: {SUPPORTED_RATES})")
    channels = frames.samples.shape[1]
    if channels > 2:
        raise UnsupportedFormat(f"stems must be mono or stereo, got {channels} channels")
    mono = frames.samples.mean(axis=1) if channels == 2 else frames.samples[:, 0]
    if not np.all(np.isfinite(mono)):
        raise CorruptFile("stem contains non-finite samples")
    return AudioClip(sample_rate=frames.sample_rate, samples=mono)


def _encode(samples: np.ndarray, bit_depth: int) -> tuple[bytes, int]:
    if bit_depth == 32:
        return samples.astype("<f4").tobytes(), WAVE_FORMAT_IEEE_FLOAT
    if bit_depth == 16:
        ints = np.clip(np.rint(samples * 32768.0), -32768, 32767).astype("<i2")
        return ints.tobytes(), WAVE_FORMAT_PCM
    if bit_depth == 24:
        ints = np.clip(np.rint(samples * 8388608.0), -8388608, 8388607).astype("<i4")
        raw = ints.astype("<u4").view(np.uint8).reshape(-1, 4)
        return raw[:, :3].tobytes(), WAVE_FORMAT_PCM
    raise ValueError(f"bit_depth must be 16, 24 or 32, got {bit_depth}")


def write_wav(buffer: RenderedBuffer, bit_depth: int = 32) -> bytes:
    """Serialize a render to WAV bytes.

    1-2 channels use the classic header; more channels require a known
    speaker mask and are written as WAVE_FORMAT_EXTENSIBLE.
    """
    channels = buffer.channel_count
    if channels > 2 and channels not in CHANNEL_MASKS:
        raise UnsupportedChannelCount(
            f"{channels} channels (supported: 1, 2, {sorted(CHANNEL_MASKS)})"
        )
    payload, tag = _encode(np.ascontiguousarray(buffer.samples), bit_depth)
    block_align = channels * bit_depth // 8
    byte_rate = buffer.sample_rate * block_align
    if channels <= 2:
        fmt = struct.pack(
            "<HHIIHH", tag, channels, buffer.sample_rate, byte_rate, block_align, bit_depth
        )
    else:
        fmt = struct.pack(
            "<HHIIHHHHI",
            WAVE_FORMAT_EXTENSIBLE,
            channels,
            buffer.sample_rate,
            byte_rate,
            block_align,
            bit_depth,
            22,  # cbSize
            bit_depth,  # valid bits
            CHANNEL_MASKS[channels],
        ) + struct.pack("<H", tag) + _SUBFORMAT_TAIL
    body = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def clip_to_buffer(clip: AudioClip) -> RenderedBuffer:
    """Wrap a mono clip so it can go through write_wav unchanged."""
    return RenderedBuffer(
        sample_rate=clip.sample_rate,
        channel_count=1,
        samples=clip.samples.reshape(-1, 1),
        meter_frames=np.zeros((0, 1)),
    )
