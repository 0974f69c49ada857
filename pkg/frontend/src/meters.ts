/** Channel volume indicators fed by stream RMS values.
 *
 * Display ballistics: a bar jumps up instantly to a new RMS but falls
 * linearly to zero over 100 ms, so short blocks stay readable. The bar
 * value is exactly the streamed RMS whenever the stream is keeping up
 * (every block arrives within the decay window with a value >= the decayed
 * previous one, since decay only lowers bars between frames).
 */

export const DECAY_MS = 100;

export class MeterModel {
  private values: number[] = [];
  private lastUpdate = 0;

  constructor(private decayMs: number = DECAY_MS) {}

  /** Feed one frame's RMS values; returns the displayed bar heights. */
  update(rms: ArrayLike<number>, nowMs: number): number[] {
    const dt = this.values.length ? Math.max(nowMs - this.lastUpdate, 0) : 0;
    const keep = Math.max(0, 1 - dt / this.decayMs);
    const next: number[] = [];
    for (let i = 0; i < rms.length; i++) {
      const decayed = (this.values[i] ?? 0) * keep;
      next.push(Math.max(rms[i], decayed));
    }
    this.values = next;
    this.lastUpdate = nowMs;
    return [...next];
  }

  /** Advance time without new data (paused stream heartbeats carry zeros). */
  tick(nowMs: number): number[] {
    return this.update(new Array(this.values.length).fill(0), nowMs);
  }

  get current(): number[] {
    return [...this.values];
  }
}

/** Per-channel RMS of interleaved samples; mirrors the engine's meters. */
export function computeRms(samples: Float32Array, channels: number): number[] {
  const frames = Math.floor(samples.length / channels);
  const out = new Array(channels).fill(0);
  if (!frames) return out;
  for (let i = 0; i < frames; i++) {
    for (let c = 0; c < channels; c++) {
      const s = samples[i * channels + c];
      out[c] += s * s;
    }
  }
  return out.map((total) => Math.sqrt(total / frames));
}
