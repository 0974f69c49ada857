import json
from pathlib import Path

import pytest

from a2bundle.synth import InvalidSpec, parse_spec, synth_fixture

DUET_SPEC = {
    "seed": 7,
    "video": {"width": 1280, "height": 720, "fps": 30.0, "duration": 10.0},
    "sample_rate": 48000,
    "annotation_fps": 4.0,
    "objects": [
        {
            "label": "violin",
            "start_center": [200, 360],
            "end_center": [400, 360],
            "depth": [0.3, 0.5],
            "size": [120, 200],
            "sound": {"kind": "tone", "freq": 440.0, "level": 0.4},
            "tag": "fiddle",
            "confidence": 0.95,
        },
        {
            "label": "flute",
            "start_center": [900, 360],
            "end_center": [900, 360],
            "depth": [0.6, 0.6],
            "size": [100, 180],
            "sound": {"kind": "tone", "freq": 660.0, "level": 0.4},
            "tag": "flute",
            "confidence": 0.9,
        },
    ],
    "ambient": [
        {"id": "room", "sound": {"kind": "noise", "level": 0.1}, "tag": "wind noise", "confidence": 0.7}
    ],
}


def tree_bytes(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_deterministic_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    spec = parse_spec(json.dumps(DUET_SPEC))
    synth_fixture(spec, a, name="duet")
    synth_fixture(spec, b, name="duet")
    assert tree_bytes(a) == tree_bytes(b)


def test_linear_path_reproduced_exactly(tmp_path):
    spec = parse_spec(json.dumps(DUET_SPEC))
    bundle_path = synth_fixture(spec, tmp_path, name="duet")
    bundle = json.loads(bundle_path.read_text())
    assert len(bundle["frames"]) == 41  # 10 s at 4 fps, inclusive of t=0
    for k, frame in enumerate(bundle["frames"]):
        t = min(k / 4.0, 10.0)
        alpha = t / 10.0
        assert frame["t"] == t
        violin = frame["detections"][0]
        cx = violin["bbox"][0] + violin["bbox"][2] / 2.0
        assert cx == pytest.approx(200 + alpha * 200, abs=1e-9)
        assert violin["depth"] == pytest.approx(0.3 + alpha * 0.2, abs=1e-12)


def test_crossing_paths_fixture(tmp_path):
    spec_doc = {
        "seed": 3,
        "video": {"width": 640, "height": 480, "fps": 30.0, "duration": 4.0},
        "objects": [
            {
                "label": "person",
                "start_center": [100, 240],
                "end_center": [540, 240],
                "depth": [0.4, 0.4],
                "size": [60, 120],
                "sound": {"kind": "tone", "freq": 200.0, "level": 0.3},
                "tag": "speech",
            },
            {
                "label": "person",
                "start_center": [540, 240],
                "end_center": [100, 240],
                "depth": [0.4, 0.4],
                "size": [60, 120],
                "sound": {"kind": "tone", "freq": 300.0, "level": 0.3},
                "tag": "speech",
            },
        ],
    }
    bundle = json.loads(synth_fixture(parse_spec(json.dumps(spec_doc)), tmp_path).read_text())
    first = bundle["frames"][0]["detections"]
    last = bundle["frames"][-1]["detections"]
    assert first[0]["bbox"][0] < first[1]["bbox"][0]
    assert last[0]["bbox"][0] > last[1]["bbox"][0]  # they crossed


def test_kitchen_four_sources(tmp_path):
    spec_doc = {
        "video": {"width": 1280, "height": 720, "fps": 30.0, "duration": 6.0},
        "objects": [
            {"label": label, "start_center": [200 + 250 * i, 360], "end_center": [200 + 250 * i, 360],
             "depth": [0.5, 0.5], "size": [100, 100],
             "sound": {"kind": "tone", "freq": 300.0 + 100 * i, "level": 0.2}, "tag": tag}
            for i, (label, tag) in enumerate(
                [("sink", "water tap faucet"), ("microwave", "microwave oven"),
                 ("blender", "blender"), ("oven", "sizzle")]
            )
        ],
    }
    bundle = json.loads(synth_fixture(parse_spec(json.dumps(spec_doc)), tmp_path).read_text())
    assert len(bundle["stems"]) == 4
    assert all(len(f["detections"]) == 4 for f in bundle["frames"])


def test_bbox_clamped_inside_frame(tmp_path):
    spec_doc = {
        "video": {"width": 320, "height": 240, "fps": 30.0, "duration": 2.0},
        "objects": [
            {"label": "dog", "start_center": [0, 0], "end_center": [320, 240],
             "depth": [0.2, 0.8], "size": [80, 60],
             "sound": {"kind": "silence"}, "tag": "bark"}
        ],
    }
    bundle = json.loads(synth_fixture(parse_spec(json.dumps(spec_doc)), tmp_path).read_text())
    for frame in bundle["frames"]:
        x, y, w, h = frame["detections"][0]["bbox"]
        assert x >= 0 and y >= 0
        assert x + w <= 320 and y + h <= 240


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("video"),
        lambda d: d["objects"][0].pop("label"),
        lambda d: d["objects"][0].__setitem__("sound", {"kind": "theremin"}),
        lambda d: d["video"].__setitem__("duration", 0),
        lambda d: d.__setitem__("sample_rate", 8000),
    ],
)
def test_invalid_specs_rejected(mutate):
    doc = json.loads(json.dumps(DUET_SPEC))
    mutate(doc)
    with pytest.raises(InvalidSpec):
        parse_spec(json.dumps(doc))


def test_malformed_json_rejected():
    with pytest.raises(InvalidSpec):
        parse_spec("{oops")
