import json
import math
from pathlib import Path

import pytest

from auralis.errors import InvariantError, ParseError, SchemaError
from auralis.geometry import intrinsics_from_fov
from auralis.ingest import (
    AMBIENT,
    AnnotationBundle,
    Detection,
    FrameAnnotations,
    StemInfo,
    associate_tracks,
    bind_stems,
    build_default_project,
    default_synonyms,
    ingest_bundle,
    load_synonyms,
    normalize_label,
    parse_bundle,
)
from auralis.scene import VideoMeta, validate
from conftest import DUET_BUNDLE
from oracles import optimal_assignment

DATA = Path(__file__).parent / "data"
K = intrinsics_from_fov(640, 480, math.radians(60.0))


def bundle_json(frames=(), stems=(), width=640, height=480, duration=10.0):
    return json.dumps(
        {
            "video": {"width": width, "height": height, "fps": 25.0, "duration": duration},
            "frames": list(frames),
            "stems": list(stems),
        }
    )


def frame(t, *dets):
    return {"t": t, "detections": [d for d in dets]}


def det(label, cx, cy, depth=0.5, w=40, h=40):
    return {"label": label, "bbox": [cx - w / 2, cy - h / 2, w, h], "depth": depth}


class TestParseBundle:
    def test_empty_bundle_valid(self):
        b = parse_bundle(bundle_json())
        assert b.frames == ()
        assert b.stems == ()

    def test_fixture_equals_hand_built(self):
        b = parse_bundle(DATA.joinpath("parse_fixture.bundle.json").read_bytes())
        expected = AnnotationBundle(
            video=VideoMeta(width=640, height=480, fps=25.0, duration=1.0),
            frames=(
                FrameAnnotations(
                    t=0.0,
                    detections=(
                        Detection(label="dog", bbox=(100.0, 200.0, 80.0, 60.0), center_depth=0.25),
                        Detection(label="person", bbox=(400.0, 100.0, 60.0, 200.0), center_depth=0.75),
                    ),
                ),
                FrameAnnotations(
                    t=0.5,
                    detections=(
                        Detection(label="dog", bbox=(120.0, 200.0, 80.0, 60.0), center_depth=0.30),
                        Detection(label="person", bbox=(390.0, 100.0, 60.0, 200.0), center_depth=0.70),
                    ),
                ),
            ),
            stems=(
                StemInfo(stem_id="s0", file="stems/dog.wav", tags=(("bark", 0.8),)),
                StemInfo(stem_id="s1", file="stems/talk.wav", tags=(("speech", 0.9),)),
            ),
        )
        assert b == expected

    def test_confidence_out_of_range(self):
        raw = bundle_json(stems=[{"id": "s0", "file": "a.wav", "tags": [{"label": "x", "confidence": 1.5}]}])
        with pytest.raises(InvariantError):
            parse_bundle(raw)

    def test_descending_frame_times(self):
        raw = bundle_json(frames=[frame(1.0), frame(0.5)])
        with pytest.raises(InvariantError):
            parse_bundle(raw)

    def test_bbox_out_of_bounds(self):
        raw = bundle_json(frames=[frame(0.0, det("dog", 700, 100))])
        with pytest.raises(InvariantError):
            parse_bundle(raw)

    def test_malformed_and_schema_errors(self):
        with pytest.raises(ParseError):
            parse_bundle(b"[not json")
        with pytest.raises(SchemaError):
            parse_bundle(b'{"video": {"width": 1}}')


class TestAssociateTracks:
    def test_one_object_one_track(self):
        raw = bundle_json(frames=[frame(i * 0.5, det("dog", 100 + i, 200)) for i in range(4)])
        tracks = associate_tracks(parse_bundle(raw), K)
        assert len(tracks) == 1
        assert tracks[0].label == "dog"
        assert len(tracks[0].model_keyframes) == 4

    def test_two_same_label_objects_never_swap(self):
        frames = [
            frame(i * 0.5, det("person", 100 + 3 * i, 200), det("person", 500 - 3 * i, 200))
            for i in range(6)
        ]
        bundle = parse_bundle(bundle_json(frames=frames))
        tracks = associate_tracks(bundle, K)
        assert len(tracks) == 2
        # Left track keeps drifting right from x=100; right track from x=500.
        xs_left = [kf.p[0] for kf in tracks[0].model_keyframes]
        xs_right = [kf.p[0] for kf in tracks[1].model_keyframes]
        assert all(a < b for a, b in zip(xs_left, xs_right))
        assert len(tracks[0].model_keyframes) == len(tracks[1].model_keyframes) == 6

    def test_greedy_matches_optimal_on_stable_fixture(self):
        frames = [
            frame(i * 0.5, det("person", 120 + 5 * i, 200), det("person", 480 - 5 * i, 220))
            for i in range(5)
        ]
        bundle = parse_bundle(bundle_json(frames=frames))
        tracks = associate_tracks(bundle, K)
        centers = {0: (120.0, 200.0), 1: (480.0, 220.0)}
        for i, fr in enumerate(bundle.frames[1:], start=1):
            dets = [d.center for d in fr.detections]
            best = optimal_assignment(dets, [centers[0], centers[1]])
            for d_idx, t_idx in best.items():
                centers[t_idx] = dets[d_idx]
        # Optimal assignment keeps identity: track 0 stays the left one.
        assert centers[0][0] == pytest.approx(120 + 5 * 4)
        assert [kf.p[0] for kf in tracks[0].model_keyframes] == sorted(
            kf.p[0] for kf in tracks[0].model_keyframes
        )

    def test_label_only_in_one_frame(self):
        frames = [frame(float(i), *( [det("cat", 300, 300)] if i == 7 else [] )) for i in range(9)]
        tracks = associate_tracks(parse_bundle(bundle_json(frames=frames)), K)
        assert len(tracks) == 1
        assert len(tracks[0].model_keyframes) == 1
        assert tracks[0].model_keyframes[0].t == 7.0

    def test_deterministic(self):
        raw = bundle_json(
            frames=[frame(i * 0.25, det("dog", 100 + i, 200), det("cat", 400, 100 + i)) for i in range(8)]
        )
        bundle = parse_bundle(raw)
        assert associate_tracks(bundle, K) == associate_tracks(bundle, K)

    def test_keyframes_sorted_within_duration(self):
        raw = bundle_json(frames=[frame(i * 0.5, det("dog", 100, 200)) for i in range(20)])
        tracks = associate_tracks(parse_bundle(raw), K)
        times = [kf.t for kf in tracks[0].model_keyframes]
        assert times == sorted(times)
        assert all(0 <= t <= 10.0 for t in times)


class TestSynonyms:
    def test_parse_table(self):
        table = load_synonyms("violin: fiddle, bowed string\n# comment\nflute: piccolo\n")
        assert table["fiddle"] == "violin"
        assert table["violin"] == "violin"
        assert table["piccolo"] == "flute"

    def test_unknown_label_normalizes_to_itself(self):
        assert normalize_label("Theremin", {}) == "theremin"

    def test_default_table_loads(self):
        table = default_synonyms()
        assert table["fiddle"] == "violin"
        assert table["bark"] == "dog"


def stem(stem_id, file, *tags):
    return StemInfo(stem_id=stem_id, file=file, tags=tuple(tags))


class TestBindStems:
    def _skeletons(self, *labels):
        from auralis.ingest import TrackSkeleton

        counts = {}
        out = []
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
            out.append(TrackSkeleton(track_id=f"{label}-{counts[label]}", label=label, model_keyframes=()))
        return out

    def test_exact_name_bindings(self):
        tracks = self._skeletons("violin", "flute")
        stems = [stem("s0", "a.wav", ("violin", 0.9)), stem("s1", "b.wav", ("flute", 0.8))]
        bindings = bind_stems(tracks, stems)
        assert bindings[0].track_label == "violin"
        assert bindings[1].track_label == "flute"
        assert bindings[0].matched_confidence == 0.9

    def test_synonym_bridges_vocabularies(self):
        tracks = self._skeletons("violin")
        bindings = bind_stems(tracks, [stem("s0", "a.wav", ("fiddle", 0.7))])
        assert bindings[0].track_label == "violin"
        assert bindings[0].track_id == "violin-1"

    def test_unmatched_goes_ambient(self):
        tracks = self._skeletons("violin")
        bindings = bind_stems(tracks, [stem("s0", "a.wav", ("wind noise", 0.6))])
        assert bindings[0].track_label == AMBIENT
        assert bindings[0].track_id is None
        assert bindings[0].matched_confidence == 0.0

    def test_highest_confidence_tag_wins(self):
        tracks = self._skeletons("dog", "person")
        bindings = bind_stems(tracks, [stem("s0", "a.wav", ("speech", 0.4), ("bark", 0.9))])
        assert bindings[0].track_label == "dog"

    def test_each_stem_bound_once_duplicate_labels(self):
        tracks = self._skeletons("person", "person")
        stems = [
            stem("s0", "a.wav", ("speech", 0.9)),
            stem("s1", "b.wav", ("speech", 0.8)),
            stem("s2", "c.wav", ("speech", 0.7)),
        ]
        bindings = bind_stems(tracks, stems)
        assert bindings[0].track_id == "person-1"  # earliest track wins
        assert bindings[1].track_id == "person-2"
        assert bindings[2].track_label == AMBIENT  # no unbound track left
        assert len({b.stem_id for b in bindings}) == 3

    def test_deterministic_over_100_runs(self):
        tracks = self._skeletons("violin", "flute")
        stems = [
            stem("s0", "a.wav", ("fiddle", 0.91)),
            stem("s1", "b.wav", ("flute", 0.88)),
            stem("s2", "c.wav", ("wind noise", 0.66)),
        ]
        first = bind_stems(tracks, stems)
        assert all(bind_stems(tracks, stems) == first for _ in range(99))


class TestBuildDefaultProject:
    def test_empty_bundle_one_stem_gives_ambient_track(self):
        raw = bundle_json(stems=[{"id": "s0", "file": "a.wav", "tags": [{"label": "rain", "confidence": 0.5}]}])
        project = build_default_project(parse_bundle(raw))
        assert len(project.tracks) == 1
        track = project.tracks[0]
        assert not track.directional
        assert track.gain == 1.0
        assert track.stem_ref == "a.wav"
        assert validate(project) == []

    def test_duet_fixture_two_directional_tracks(self):
        bundle = parse_bundle(json.dumps(DUET_BUNDLE))
        project = build_default_project(bundle, layout_id="five_one")
        directional = [t for t in project.tracks if t.directional]
        ambient = [t for t in project.tracks if not t.directional]
        assert len(directional) == 2
        assert len(ambient) == 1
        by_label = {t.label: t for t in directional}
        assert by_label["violin"].stem_ref == "stems/violin.wav"
        assert by_label["flute"].stem_ref == "stems/flute.wav"
        assert all(len(t.model_keyframes) == 3 for t in directional)
        assert project.use_model_positions
        assert project.layout_id == "five_one"
        assert validate(project) == []

    def test_four_stem_kitchen_fixture(self):
        frames = [
            frame(
                float(i),
                det("sink", 100, 100),
                det("microwave", 300, 100),
                det("blender", 500, 100),
                det("oven", 200, 300),
            )
            for i in range(3)
        ]
        stems = [
            {"id": "s0", "file": "sink.wav", "tags": [{"label": "water tap faucet", "confidence": 0.8}]},
            {"id": "s1", "file": "mw.wav", "tags": [{"label": "microwave oven", "confidence": 0.7}]},
            {"id": "s2", "file": "bl.wav", "tags": [{"label": "blender", "confidence": 0.9}]},
            {"id": "s3", "file": "ov.wav", "tags": [{"label": "sizzle", "confidence": 0.6}]},
        ]
        project = build_default_project(parse_bundle(bundle_json(frames=frames, stems=stems)))
        assert len(project.tracks) == 4
        assert all(t.directional and t.stem_ref for t in project.tracks)

    def test_listener_at_origin(self):
        project = build_default_project(parse_bundle(bundle_json()))
        kf = project.listener.keyframes[0]
        assert kf.position == (0.0, 0.0, 0.0)
        assert kf.orientation == (0.0, 0.0, 0.0)

    def test_ambient_track_labeled_by_best_tag(self):
        stems = [
            {
                "id": "s0",
                "file": "a.wav",
                "tags": [
                    {"label": "hum", "confidence": 0.3},
                    {"label": "rain", "confidence": 0.9},
                ],
            }
        ]
        project = build_default_project(parse_bundle(bundle_json(stems=stems)))
        assert project.tracks[0].label == "rain"


class TestIngestBundle:
    def test_reads_stems_from_disk(self, duet_dir):
        project, stems = ingest_bundle(duet_dir / "duet.bundle.json", layout_id="quad")
        assert set(stems) == {"stems/violin.wav", "stems/flute.wav", "stems/noise.wav"}
        assert all(clip.sample_rate == 48000 for clip in stems.values())
        assert project.layout_id == "quad"

    def test_missing_stem_propagates(self, tmp_path):
        raw = bundle_json(stems=[{"id": "s0", "file": "gone.wav", "tags": []}])
        path = tmp_path / "b.bundle.json"
        path.write_text(raw)
        with pytest.raises(FileNotFoundError):
            ingest_bundle(path)
