/** Streamed PCM playback through Web Audio.
 *
 * Blocks from the preview stream are scheduled back to back on an
 * AudioContext. When the output device exposes enough channels the buffer
 * keeps the layout's channel count; otherwise everything folds down to
 * stereo: front pair passes through, center and the rear pair join both
 * sides at -3 dB (0.70711), LFE is dropped. The original video element
 * stays muted; this stream is the only audible path.
 */

import type { PreviewFrame } from "./protocol.js";

const FOLD = 0.7071067811865476;

export function foldDownToStereo(frame: PreviewFrame): [Float32Array, Float32Array] {
  const left = new Float32Array(frame.frames);
  const right = new Float32Array(frame.frames);
  const c = frame.channels;
  for (let i = 0; i < frame.frames; i++) {
    const at = (ch: number) => frame.samples[i * c + ch];
    if (c === 1) {
      left[i] = right[i] = at(0);
    } else if (c === 2) {
      left[i] = at(0);
      right[i] = at(1);
    } else if (c === 4) {
      left[i] = at(0) + FOLD * at(2);
      right[i] = at(1) + FOLD * at(3);
    } else {
      // five_one order FL FR C LFE RL RR; LFE carries nothing by contract
      left[i] = at(0) + FOLD * (at(2) + at(4));
      right[i] = at(1) + FOLD * (at(2) + at(5));
    }
  }
  return [left, right];
}

export class StreamPlayer {
  private context: AudioContext;
  private nextTime = 0;

  constructor(context?: AudioContext) {
    this.context = context ?? new AudioContext();
  }

  get outputChannels(): number {
    return this.context.destination.maxChannelCount;
  }

  /** Schedule one block; returns the number of channels actually played. */
  play(frame: PreviewFrame, sampleRate: number): number {
    if (frame.frames === 0) return 0;
    const direct = this.outputChannels >= frame.channels;
    const channels = direct ? frame.channels : 2;
    const buffer = this.context.createBuffer(channels, frame.frames, sampleRate);
    if (direct) {
      for (let ch = 0; ch < channels; ch++) {
        const data = buffer.getChannelData(ch);
        for (let i = 0; i < frame.frames; i++) data[i] = frame.samples[i * frame.channels + ch];
      }
    } else {
      const [left, right] = foldDownToStereo(frame);
      buffer.getChannelData(0).set(left);
      buffer.getChannelData(1).set(right);
    }
    const source = this.context.createBufferSource();
    source.buffer = buffer;
    source.connect(this.context.destination);
    const now = this.context.currentTime;
    if (this.nextTime < now + 0.02) this.nextTime = now + 0.02; // small safety lead
    source.start(this.nextTime);
    this.nextTime += frame.frames / sampleRate;
    return channels;
  }

  reset(): void {
    this.nextTime = 0;
  }
}
