/** Preview stream framing.
 *
 * Binary server frames: 24-byte little-endian header (playhead f64, block
 * index u64, channel count u32, frame count u32), then frame_count x
 * channels float32 samples, then one float32 RMS per channel. A frame
 * count of 0 is a heartbeat. Text frames carry transport commands.
 */

export interface PreviewFrame {
  playhead: number;
  blockIndex: bigint;
  channels: number;
  frames: number;
  samples: Float32Array; // interleaved, length frames * channels
  rms: Float32Array; // length channels
}

export const FRAME_HEADER_BYTES = 24;

export function decodeFrame(buffer: ArrayBuffer): PreviewFrame {
  if (buffer.byteLength < FRAME_HEADER_BYTES) {
    throw new Error(`frame too short: ${buffer.byteLength} bytes`);
  }
  const view = new DataView(buffer);
  const playhead = view.getFloat64(0, true);
  const blockIndex = view.getBigUint64(8, true);
  const channels = view.getUint32(16, true);
  const frames = view.getUint32(20, true);
  const expected = FRAME_HEADER_BYTES + 4 * frames * channels + 4 * channels;
  if (buffer.byteLength !== expected) {
    throw new Error(`frame length ${buffer.byteLength}, expected ${expected}`);
  }
  const samples = new Float32Array(buffer, FRAME_HEADER_BYTES, frames * channels);
  const rms = new Float32Array(buffer, FRAME_HEADER_BYTES + 4 * frames * channels, channels);
  return { playhead, blockIndex, channels, frames, samples, rms };
}

export function isHeartbeat(frame: PreviewFrame): boolean {
  return frame.frames === 0;
}

/** De-interleave one channel out of a frame's sample payload. */
export function channelSamples(frame: PreviewFrame, channel: number): Float32Array {
  const out = new Float32Array(frame.frames);
  for (let i = 0; i < frame.frames; i++) {
    out[i] = frame.samples[i * frame.channels + channel];
  }
  return out;
}

export type TransportCommand = string;

export const transport = {
  play: (): TransportCommand => "play",
  pause: (): TransportCommand => "pause",
  seek: (t: number): TransportCommand => `seek ${t}`,
  prevSecond: (): TransportCommand => "step -1",
  nextSecond: (): TransportCommand => "step 1",
};
