import { describe, expect, it } from "vitest";

import { numericPositionEdit, rebindEdits, volumeEdit, waveformPeaks } from "../src/panel.js";
import { positionAt } from "../src/position.js";
import { makeDocument, makeTrack } from "./helpers.js";

describe("volume and numeric edits", () => {
  it("maps the slider to a gain property edit", () => {
    expect(volumeEdit("a", 0.5)).toEqual({
      op: "track-property",
      track_id: "a",
      property: "gain",
      value: 0.5,
    });
  });

  it("rejects out-of-range or non-finite volumes inline", () => {
    expect(volumeEdit("a", -0.1)).toBeNull();
    expect(volumeEdit("a", 4.5)).toBeNull();
    expect(volumeEdit("a", NaN)).toBeNull();
  });

  it("parses numeric xyz and rejects garbage without emitting", () => {
    const edit = numericPositionEdit("a", 1.0, ["1.5", "-0.25", "-5"]);
    expect(edit).toEqual({
      op: "keyframe-upsert",
      track_id: "a",
      t: 1.0,
      p: [1.5, -0.25, -5],
      origin: "user",
    });
    expect(numericPositionEdit("a", 1.0, ["x", "0", "0"])).toBeNull();
    expect(numericPositionEdit("a", 1.0, ["1", "", "0"])).toBeNull();
  });
});

describe("name rebinding", () => {
  it("swapping two track names swaps their stems, keeps keyframes/colors", () => {
    const doc = makeDocument([
      makeTrack({
        id: "t1",
        label: "violin",
        stem_ref: "stems/violin.wav",
        model_keyframes: [{ t: 0, p: [-1, 0, -2], origin: "model" }],
      }),
      makeTrack({
        id: "t2",
        label: "flute",
        stem_ref: "stems/flute.wav",
        color: [69, 123, 157],
        model_keyframes: [{ t: 0, p: [1, 0, -2], origin: "model" }],
      }),
    ]);
    const edits = rebindEdits(doc, "t1", "flute");
    expect(edits).toEqual([
      { op: "track-property", track_id: "t1", property: "label", value: "flute" },
      { op: "track-property", track_id: "t2", property: "label", value: "violin" },
      { op: "track-property", track_id: "t1", property: "stem_ref", value: "stems/flute.wav" },
      { op: "track-property", track_id: "t2", property: "stem_ref", value: "stems/violin.wav" },
    ]);
    // No keyframe or color ops: positions and colors stay with their tracks.
    expect(edits.every((e) => e.op === "track-property")).toBe(true);
  });

  it("renaming to an unused label is a plain relabel", () => {
    const doc = makeDocument([makeTrack({ id: "t1", label: "violin" })]);
    expect(rebindEdits(doc, "t1", "cello")).toEqual([
      { op: "track-property", track_id: "t1", property: "label", value: "cello" },
    ]);
    expect(rebindEdits(doc, "t1", "violin")).toEqual([]);
  });
});

describe("waveform strip", () => {
  it("computes min/max peak pairs per bucket", () => {
    const samples = new Float32Array(1000);
    for (let i = 0; i < 1000; i++) samples[i] = Math.sin((2 * Math.PI * i) / 100);
    const peaks = waveformPeaks(samples, 10);
    expect(peaks).toHaveLength(10);
    for (const [min, max] of peaks) {
      expect(min).toBeLessThan(-0.99);
      expect(max).toBeGreaterThan(0.99);
    }
  });

  it("handles empty input", () => {
    expect(waveformPeaks(new Float32Array(0), 5)).toEqual([]);
  });
});

describe("client-side position evaluation", () => {
  const track = makeTrack({
    id: "a",
    model_keyframes: [
      { t: 0, p: [0, 0, -2], origin: "model" },
      { t: 2, p: [2, 0, -2], origin: "model" },
    ],
    user_keyframes: [
      { t: 0.5, p: [-5, 0, -1], origin: "user" },
      { t: 1.0, p: [-3, 0, -1], origin: "user" },
    ],
  });

  it("interpolates inside the user span, model outside (toggle on)", () => {
    expect(positionAt(track, 0.75, true)).toEqual([-4, 0, -1]);
    expect(positionAt(track, 1.5, true)).toEqual([1.5, 0, -2]);
    expect(positionAt(track, 3.0, true)).toEqual([2, 0, -2]); // clamp
  });

  it("step-holds user keyframes with the toggle off", () => {
    expect(positionAt(track, 0.0, false)).toEqual([-5, 0, -1]); // before first: first
    expect(positionAt(track, 0.9, false)).toEqual([-5, 0, -1]);
    expect(positionAt(track, 1.0, false)).toEqual([-3, 0, -1]);
    expect(positionAt(track, 99, false)).toEqual([-3, 0, -1]);
  });

  it("returns null when the effective timeline is empty", () => {
    const bare = makeTrack({ id: "b" });
    expect(positionAt(bare, 0, true)).toBeNull();
    const modelOnly = makeTrack({
      id: "c",
      model_keyframes: [{ t: 0, p: [0, 0, -1], origin: "model" }],
    });
    expect(positionAt(modelOnly, 0, false)).toBeNull();
  });
});
