"""Command line entry points: analyze a video, or synthesize a fixture."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analyze import AnalyzeConfig, DecodeError, ModelUnavailable, analyze_video
from .synth import InvalidSpec, parse_spec, synth_fixture


def _cmd_analyze(args) -> int:
    config = AnalyzeConfig(sample_fps=args.fps)
    bundle = analyze_video(
        Path(args.video),
        Path(args.output),
        config=config,
        audio_path=Path(args.audio) if args.audio else None,
    )
    print(bundle)
    return 0


def _cmd_synth(args) -> int:
    spec = parse_spec(Path(args.spec).read_bytes())
    bundle = synth_fixture(spec, Path(args.output), name=Path(args.spec).stem)
    print(bundle)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="a2bundle", description="annotation bundle producer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the model pipeline over a video")
    p.add_argument("video")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--audio", default=None, help="soundtrack WAV when not demuxable")
    p.add_argument("--fps", type=float, default=4.0, help="annotation sampling rate")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("synth", help="generate a deterministic synthetic fixture")
    p.add_argument("spec", help="synth spec JSON")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: missing file: {e}", file=sys.stderr)
        return 2
    except (InvalidSpec, DecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ModelUnavailable as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
