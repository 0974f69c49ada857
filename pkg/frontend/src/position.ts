/** Client-side evaluation of track positions and the listener pose.
 *
 * Matches the engine's semantics so dots and spheres move identically to
 * what the audio does between server round trips: with model positions on,
 * user keyframes override inside their span and the model timeline applies
 * outside it; with model positions off, user keyframes hold stepwise.
 */

import type { Keyframe, ListenerKeyframe, Track, Vec3 } from "./types.js";

function lerp3(a: Vec3, b: Vec3, alpha: number): Vec3 {
  return [
    a[0] + (b[0] - a[0]) * alpha,
    a[1] + (b[1] - a[1]) * alpha,
    a[2] + (b[2] - a[2]) * alpha,
  ];
}

function evalLinear(kfs: Keyframe[], t: number): Vec3 {
  if (t <= kfs[0].t) return kfs[0].p;
  if (t >= kfs[kfs.length - 1].t) return kfs[kfs.length - 1].p;
  for (let i = 1; i < kfs.length; i++) {
    if (t <= kfs[i].t) {
      const lo = kfs[i - 1];
      const hi = kfs[i];
      return lerp3(lo.p, hi.p, (t - lo.t) / (hi.t - lo.t));
    }
  }
  return kfs[kfs.length - 1].p;
}

export function positionAt(track: Track, t: number, useModel: boolean): Vec3 | null {
  const user = track.user_keyframes;
  const model = track.model_keyframes;
  if (!useModel) {
    if (!user.length) return null;
    let value = user[0].p;
    for (const kf of user) {
      if (kf.t <= t) value = kf.p;
    }
    return value;
  }
  if (user.length && t >= user[0].t && t <= user[user.length - 1].t) {
    return evalLinear(user, t);
  }
  if (model.length) return evalLinear(model, t);
  if (user.length) return t < user[0].t ? user[0].p : user[user.length - 1].p;
  return null;
}

export interface Pose {
  position: Vec3;
  yaw: number;
  pitch: number;
  roll: number;
}

export const IDENTITY_POSE: Pose = { position: [0, 0, 0], yaw: 0, pitch: 0, roll: 0 };

export function poseAt(keyframes: ListenerKeyframe[], t: number): Pose {
  if (!keyframes.length) return IDENTITY_POSE;
  const toPose = (k: ListenerKeyframe): Pose => ({
    position: k.position,
    yaw: k.orientation[0],
    pitch: k.orientation[1],
    roll: k.orientation[2],
  });
  if (t <= keyframes[0].t) return toPose(keyframes[0]);
  const last = keyframes[keyframes.length - 1];
  if (t >= last.t) return toPose(last);
  for (let i = 1; i < keyframes.length; i++) {
    if (t <= keyframes[i].t) {
      const lo = keyframes[i - 1];
      const hi = keyframes[i];
      const alpha = (t - lo.t) / (hi.t - lo.t);
      const position = lerp3(lo.position, hi.position, alpha);
      const o = lerp3(lo.orientation, hi.orientation, alpha);
      return { position, yaw: o[0], pitch: o[1], roll: o[2] };
    }
  }
  return toPose(last);
}
