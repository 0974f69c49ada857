/** Pinhole projection between video pixels and world space, plus dot sizing.
 *
 * Mirrors the engine's camera model: principal point at the image center,
 * world right-handed with +x right, +y up, -z forward; image y grows down.
 */

import type { Intrinsics, Vec3 } from "./types.js";

export function projectPoint(p: Vec3, k: Intrinsics): { u: number; v: number } | null {
  const depth = -p[2];
  if (!(depth > 0)) return null; // behind the camera: no dot
  return {
    u: (p[0] * k.focal_px) / depth + k.width / 2,
    v: (-p[1] * k.focal_px) / depth + k.height / 2,
  };
}

/** Lift a pixel back into world space at a fixed depth (z held during drags). */
export function unprojectAt(u: number, v: number, depth: number, k: Intrinsics): Vec3 {
  return [
    ((u - k.width / 2) * depth) / k.focal_px,
    (-(v - k.height / 2) * depth) / k.focal_px,
    -depth,
  ];
}

export function distanceOf(p: Vec3): number {
  return Math.hypot(p[0], p[1], p[2]);
}

/** Dot radius law: nearer objects draw bigger, clamped to [6, 40] px. */
export function dotRadius(distance: number): number {
  if (!(distance > 0)) return 40;
  return Math.min(40, Math.max(6, 6 + 40 / distance));
}

export function clampToCanvas(u: number, v: number, width: number, height: number): { u: number; v: number } {
  return {
    u: Math.min(Math.max(u, 0), width),
    v: Math.min(Math.max(v, 0), height),
  };
}
