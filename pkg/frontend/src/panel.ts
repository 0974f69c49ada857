/** Audio properties panel: name rebinding, colors, numeric positions,
 * per-source volume and waveform strips.
 */

import type { EditRequest, SceneDocument, Track, Vec3 } from "./types.js";

export function volumeEdit(trackId: string, gain: number): EditRequest | null {
  if (!Number.isFinite(gain) || gain < 0 || gain > 4) return null;
  return { op: "track-property", track_id: trackId, property: "gain", value: gain };
}

export function colorEdit(trackId: string, color: [number, number, number]): EditRequest | null {
  if (color.some((c) => !Number.isInteger(c) || c < 0 || c > 255)) return null;
  return { op: "track-property", track_id: trackId, property: "color", value: color };
}

/** Numeric xyz entry; invalid numbers fail inline and emit nothing. */
export function numericPositionEdit(
  trackId: string,
  playhead: number,
  raw: [string | number, string | number, string | number],
): EditRequest | null {
  const p = raw.map((v) => (typeof v === "number" ? v : Number.parseFloat(v)));
  if (p.some((v) => !Number.isFinite(v))) return null;
  return {
    op: "keyframe-upsert",
    track_id: trackId,
    t: playhead,
    p: p as Vec3,
    origin: "user",
  };
}

/** Rebind the audio-visual correspondence by changing a track's name.
 *
 * When another track already carries the chosen name the two swap stems
 * (the sound follows the name) while each track keeps its own position
 * keyframes and color. Otherwise it is a plain relabel.
 */
export function rebindEdits(document: SceneDocument, trackId: string, newLabel: string): EditRequest[] {
  const track = document.tracks.find((t) => t.id === trackId);
  if (!track || track.label === newLabel) return [];
  const other = document.tracks.find((t) => t.id !== trackId && t.label === newLabel);
  const edits: EditRequest[] = [
    { op: "track-property", track_id: trackId, property: "label", value: newLabel },
  ];
  if (other) {
    edits.push(
      { op: "track-property", track_id: other.id, property: "label", value: track.label },
      { op: "track-property", track_id: trackId, property: "stem_ref", value: other.stem_ref },
      { op: "track-property", track_id: other.id, property: "stem_ref", value: track.stem_ref },
    );
  }
  return edits;
}

/** Min/max peak pairs for a waveform strip, one pair per bucket. */
export function waveformPeaks(samples: ArrayLike<number>, buckets: number): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  if (!samples.length || buckets < 1) return out;
  const per = samples.length / buckets;
  for (let b = 0; b < buckets; b++) {
    const lo = Math.floor(b * per);
    const hi = Math.max(Math.min(Math.ceil((b + 1) * per), samples.length), lo + 1);
    let min = samples[lo];
    let max = samples[lo];
    for (let i = lo; i < hi; i++) {
      if (samples[i] < min) min = samples[i];
      if (samples[i] > max) max = samples[i];
    }
    out.push([min, max]);
  }
  return out;
}

export function trackSummary(track: Track): string {
  const kind = track.directional ? "directional" : "ambient";
  return `${track.label} (${kind}, gain ${track.gain.toFixed(2)})`;
}
