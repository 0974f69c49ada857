import { describe, expect, it } from "vitest";

import { computeRms, MeterModel } from "../src/meters.js";
import { channelSamples, decodeFrame, isHeartbeat, transport } from "../src/protocol.js";
import { foldDownToStereo } from "../src/playback.js";
import { encodeFrameBytes } from "./helpers.js";

describe("frame decoding", () => {
  it("decodes a hand-built frame", () => {
    const samples = new Float32Array([0.1, -0.2, 0.3, -0.4, 0.5, -0.6]); // 3 frames x 2 ch
    const rms = new Float32Array([0.32, 0.45]);
    const frame = decodeFrame(encodeFrameBytes(1.5, 42n, 2, samples, rms));
    expect(frame.playhead).toBe(1.5);
    expect(frame.blockIndex).toBe(42n);
    expect(frame.channels).toBe(2);
    expect(frame.frames).toBe(3);
    expect([...frame.samples]).toEqual([...samples]);
    expect([...frame.rms]).toEqual([...rms]);
    expect(isHeartbeat(frame)).toBe(false);
    expect([...channelSamples(frame, 1)].map((x) => Math.fround(x))).toEqual([
      Math.fround(-0.2),
      Math.fround(-0.4),
      Math.fround(-0.6),
    ]);
  });

  it("decodes heartbeats", () => {
    const frame = decodeFrame(encodeFrameBytes(4.0, 7n, 6, new Float32Array(0), new Float32Array(6)));
    expect(isHeartbeat(frame)).toBe(true);
    expect(frame.channels).toBe(6);
  });

  it("rejects truncated frames", () => {
    const good = encodeFrameBytes(0, 0n, 2, new Float32Array(4), new Float32Array(2));
    expect(() => decodeFrame(good.slice(0, good.byteLength - 3))).toThrow();
  });
});

describe("transport commands", () => {
  it("maps buttons to the in-band grammar", () => {
    expect(transport.play()).toBe("play");
    expect(transport.pause()).toBe("pause");
    expect(transport.prevSecond()).toBe("step -1");
    expect(transport.nextSecond()).toBe("step 1");
    expect(transport.seek(2.25)).toBe("seek 2.25");
  });
});

describe("meters", () => {
  it("displays exactly the streamed RMS on update", () => {
    const model = new MeterModel();
    expect(model.update([0.5, 0.25], 0)).toEqual([0.5, 0.25]);
  });

  it("decays linearly to zero over 100 ms", () => {
    const model = new MeterModel();
    model.update([1.0], 0);
    expect(model.update([0], 50)[0]).toBeCloseTo(0.5);
    expect(model.update([0], 100)[0]).toBeCloseTo(0.25); // another 50 ms from 0.5
    model.update([1.0], 200);
    expect(model.update([0], 301)[0]).toBe(0);
  });

  it("never decays upward or below zero", () => {
    const model = new MeterModel();
    model.update([0.8], 0);
    const later = model.update([0.9], 10);
    expect(later[0]).toBe(0.9); // fresh louder value wins immediately
    expect(model.update([0], 500)[0]).toBe(0);
  });

  it("computeRms matches the engine's definition", () => {
    const samples = new Float32Array([1, 0, -1, 0, 1, 0, -1, 0]); // ch0 = +-1, ch1 = 0
    const rms = computeRms(samples, 2);
    expect(rms[0]).toBeCloseTo(1.0, 9);
    expect(rms[1]).toBe(0);
  });
});

describe("stereo fold-down", () => {
  it("passes stereo through and folds 5.1 at -3 dB", () => {
    const samples = new Float32Array([
      // one frame of five_one: FL FR C LFE RL RR
      0.5, 0.25, 0.2, 0.9, 0.1, 0.05,
    ]);
    const frame = decodeFrame(encodeFrameBytes(0, 0n, 6, samples, new Float32Array(6)));
    const [left, right] = foldDownToStereo(frame);
    const fold = 0.7071067811865476;
    expect(left[0]).toBeCloseTo(0.5 + fold * (0.2 + 0.1), 6);
    expect(right[0]).toBeCloseTo(0.25 + fold * (0.2 + 0.05), 6);
    // LFE (0.9) contributes nothing
  });
});
