"""Block renderer timing sweep across layouts, source counts and block sizes.

Prints p50/p95/p99 per configuration plus the real-time budget for that
block size, so regressions against the live-preview deadline show up before
they reach an editing session.

Usage: python scripts/bench_blocks.py [blocks-per-config]
"""

import math
import sys
import time

import numpy as np

from auralis.geometry import intrinsics_from_fov
from auralis.scene import (
    ListenerKeyframe,
    ListenerPoseTrack,
    PositionKeyframe,
    SceneProject,
    SourceTrack,
    VideoMeta,
)
from auralis.spatial import get_layout, render_block
from auralis.wav import AudioClip

RATE = 48000
DURATION = 30.0


def bench_scene(sources: int):
    stems = {}
    tracks = []
    t = np.arange(round(DURATION * RATE)) / RATE
    for i in range(sources):
        ref = f"stem{i}"
        stems[ref] = AudioClip(RATE, 0.2 * np.sin(2 * np.pi * 220.0 * (i + 1) * t))
        tracks.append(
            SourceTrack(
                id=f"t{i}",
                label=f"src{i}",
                color=(40 * i % 256, 80, 120),
                stem_ref=ref,
                gain=1.0,
                model_keyframes=(
                    PositionKeyframe(t=0.0, p=(math.cos(i), 0.0, -1.0 - i), origin="model"),
                    PositionKeyframe(t=DURATION, p=(-math.cos(i), 0.5, -2.0 - i), origin="model"),
                ),
                user_keyframes=(),
                directional=True,
            )
        )
    project = SceneProject(
        video=VideoMeta(width=1280, height=720, fps=30.0, duration=DURATION),
        tracks=tuple(tracks),
        listener=ListenerPoseTrack(
            keyframes=(ListenerKeyframe(t=0.0, position=(0.0, 0.0, 0.0), orientation=(0.0, 0.0, 0.0)),)
        ),
        layout_id="five_one",
        intrinsics=intrinsics_from_fov(1280, 720, math.radians(60.0)),
        use_model_positions=True,
    )
    return project, stems


def main() -> int:
    blocks = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    print(f"{'layout':>8} {'sources':>7} {'block':>6} {'p50 us':>8} {'p95 us':>8} {'p99 us':>8} {'budget ms':>10}")
    for layout_id in ("stereo", "quad", "five_one"):
        layout = get_layout(layout_id)
        for sources in (1, 2, 4, 8):
            project, stems = bench_scene(sources)
            for block_size in (256, 1024, 4096):
                gains = None
                timings = []
                for b in range(blocks):
                    t0 = (b * block_size / RATE) % (DURATION - 1.0)
                    start = time.perf_counter()
                    _, _, gains = render_block(
                        project, stems, layout, t0, block_size, gains, sample_rate=RATE
                    )
                    timings.append(time.perf_counter() - start)
                timings.sort()
                p50 = timings[len(timings) // 2] * 1e6
                p95 = timings[int(len(timings) * 0.95)] * 1e6
                p99 = timings[int(len(timings) * 0.99)] * 1e6
                budget = block_size / RATE * 1e3
                print(
                    f"{layout_id:>8} {sources:>7} {block_size:>6} {p50:>8.0f} {p95:>8.0f} {p99:>8.0f} {budget:>10.2f}"
                )
    return 0


if __name__ == "__main__":
    sys.exit(main())
