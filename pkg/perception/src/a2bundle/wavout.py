"""Minimal mono WAV writer for emitted stems (PCM16 or float32)."""

from __future__ import annotations

import struct

import numpy as np


def write_mono_wav(samples: np.ndarray, sample_rate: int, bit_depth: int = 32) -> bytes:
    if bit_depth == 32:
        payload = samples.astype("<f4").tobytes()
        tag = 0x0003
    elif bit_depth == 16:
        payload = np.clip(np.rint(samples * 32768.0), -32768, 32767).astype("<i2").tobytes()
        tag = 0x0001
    else:
        raise ValueError(f"bit_depth must be 16 or 32, got {bit_depth}")
    block_align = bit_depth // 8
    fmt = struct.pack("<HHIIHH", tag, 1, sample_rate, sample_rate * block_align, block_align, bit_depth)
    body = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body
