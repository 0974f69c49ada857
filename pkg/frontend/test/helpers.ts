/** Test-only helpers: minimal WAV encode/decode and document builders. */

import type { SceneDocument, Track } from "../src/types.js";

export function writeFloat32MonoWav(samples: Float32Array, rate: number): Uint8Array {
  const payload = new Uint8Array(samples.buffer.slice(0), samples.byteOffset, samples.byteLength);
  const total = 44 + payload.length;
  const out = new Uint8Array(total);
  const view = new DataView(out.buffer);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) out[offset + i] = text.charCodeAt(i);
  };
  ascii(0, "RIFF");
  view.setUint32(4, total - 8, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 3, true); // IEEE float
  view.setUint16(22, 1, true);
  view.setUint32(24, rate, true);
  view.setUint32(28, rate * 4, true);
  view.setUint16(32, 4, true);
  view.setUint16(34, 32, true);
  ascii(36, "data");
  view.setUint32(40, payload.length, true);
  out.set(payload, 44);
  return out;
}

export interface DecodedWav {
  rate: number;
  channels: number;
  samples: Float32Array; // interleaved
  channelMask: number | null;
}

export function readWav(data: Uint8Array): DecodedWav {
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const tag4 = (offset: number) => String.fromCharCode(...data.subarray(offset, offset + 4));
  if (tag4(0) !== "RIFF" || tag4(8) !== "WAVE") throw new Error("not a WAV");
  let pos = 12;
  let fmtOffset = -1;
  let dataOffset = -1;
  let dataSize = 0;
  while (pos + 8 <= data.length) {
    const cid = tag4(pos);
    const size = view.getUint32(pos + 4, true);
    if (cid === "fmt ") fmtOffset = pos + 8;
    if (cid === "data") {
      dataOffset = pos + 8;
      dataSize = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (fmtOffset < 0 || dataOffset < 0) throw new Error("missing chunks");
  let tag = view.getUint16(fmtOffset, true);
  const channels = view.getUint16(fmtOffset + 2, true);
  const rate = view.getUint32(fmtOffset + 4, true);
  const bits = view.getUint16(fmtOffset + 14, true);
  let channelMask: number | null = null;
  if (tag === 0xfffe) {
    channelMask = view.getUint32(fmtOffset + 20, true);
    tag = view.getUint16(fmtOffset + 24, true);
  }
  if (tag !== 3 || bits !== 32) throw new Error(`expected float32, got tag ${tag} bits ${bits}`);
  const count = dataSize / 4;
  const samples = new Float32Array(count);
  for (let i = 0; i < count; i++) samples[i] = view.getFloat32(dataOffset + 4 * i, true);
  return { rate, channels, samples, channelMask };
}

export function makeTrack(partial: Partial<Track> & { id: string }): Track {
  return {
    label: "violin",
    color: [230, 57, 70],
    stem_ref: "stems/a.wav",
    gain: 1.0,
    model_keyframes: [],
    user_keyframes: [],
    directional: true,
    ...partial,
  };
}

export function makeDocument(tracks: Track[], overrides: Partial<SceneDocument> = {}): SceneDocument {
  return {
    video: { width: 1280, height: 720, fps: 30, duration: 4 },
    tracks,
    listener: { keyframes: [{ t: 0, position: [0, 0, 0], orientation: [0, 0, 0] }] },
    layout: "stereo",
    intrinsics: { width: 1280, height: 720, focal_px: 1108.512517, assumed_hfov: 1.047198 },
    use_model_positions: true,
    ...overrides,
  };
}

export function encodeFrameBytes(
  playhead: number,
  blockIndex: bigint,
  channels: number,
  samples: Float32Array,
  rms: Float32Array,
): ArrayBuffer {
  const frames = samples.length / channels;
  const buffer = new ArrayBuffer(24 + samples.byteLength + rms.byteLength);
  const view = new DataView(buffer);
  view.setFloat64(0, playhead, true);
  view.setBigUint64(8, blockIndex, true);
  view.setUint32(16, channels, true);
  view.setUint32(20, frames, true);
  new Float32Array(buffer, 24, samples.length).set(samples);
  new Float32Array(buffer, 24 + samples.byteLength, rms.length).set(rms);
  return buffer;
}
