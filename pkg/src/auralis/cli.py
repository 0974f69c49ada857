"""Command line entry points: ingest, render, serve, validate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import AuralisError
from .ingest import ingest_bundle, load_stems
from .scene import load_project, save_project, validate
from .service import Engine, block_size_from_env, create_app
from .spatial import get_layout, render_offline
from .wav import write_wav


def _cmd_ingest(args) -> int:
    project, _ = ingest_bundle(Path(args.bundle), layout_id=args.layout)
    out = Path(args.output) if args.output else Path(args.bundle).with_suffix("").with_suffix(
        ".auralis.json"
    )
    out.write_bytes(save_project(project))
    directional = sum(1 for t in project.tracks if t.directional)
    print(f"{out}: {len(project.tracks)} tracks ({directional} directional)")
    return 0


def _cmd_render(args) -> int:
    path = Path(args.project)
    project = load_project(path.read_bytes())
    stems = load_stems(path.parent, [t.stem_ref for t in project.tracks])
    layout = get_layout(args.layout or project.layout_id)
    block_size = args.block_size or block_size_from_env()
    buffer = render_offline(project, stems, layout, block_size=block_size)
    Path(args.output).write_bytes(write_wav(buffer, bit_depth=args.bits))
    seconds = buffer.frame_count / buffer.sample_rate
    print(f"{args.output}: {layout.id}, {seconds:.2f} s @ {buffer.sample_rate} Hz, {args.bits}-bit")
    return 0


def _cmd_validate(args) -> int:
    project = load_project(Path(args.project).read_bytes())
    violations = validate(project)
    for v in violations:
        print(f"{v.path}: {v.message}")
    if violations:
        return 1
    print(f"{args.project}: valid ({len(project.tracks)} tracks)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    engine = Engine()
    if args.bundle:
        engine.load_bundle_file(Path(args.bundle), layout_id=args.layout)
    elif args.project:
        engine.load_project_file(Path(args.project))
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auralis", description="spatial audio scene engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a default project from an annotation bundle")
    p.add_argument("bundle")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--layout", default="stereo", choices=["mono", "stereo", "quad", "five_one"])
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("render", help="render a project to a multichannel WAV")
    p.add_argument("project")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--layout", default=None, choices=["mono", "stereo", "quad", "five_one"])
    p.add_argument("--bits", type=int, default=32, choices=[16, 24, 32])
    p.add_argument("--block-size", type=int, default=None)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("validate", help="check a project file against its invariants")
    p.add_argument("project")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("serve", help="run the edit/preview service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--project", default=None)
    p.add_argument("--bundle", default=None)
    p.add_argument("--layout", default="stereo", choices=["mono", "stereo", "quad", "five_one"])
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: missing file: {e}", file=sys.stderr)
        return 2
    except (AuralisError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
