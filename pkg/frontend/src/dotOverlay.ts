/** 2D sounding-source overlay: colored dots on the video, draggable.
 *
 * A drag is down -> any number of moves -> release. Moves update the local
 * optimistic state only (the dot follows the pointer, clamped to the
 * canvas); the release emits exactly one user keyframe upsert at the
 * current playhead, with the track's depth held fixed so a 2D drag edits
 * [x, y] only. If the server rejects the edit the caller reverts by
 * refreshing the document.
 */

import { clampToCanvas, distanceOf, dotRadius, projectPoint, unprojectAt } from "./geometry.js";
import { positionAt } from "./position.js";
import type { EditRequest, Intrinsics, SceneDocument, Vec3 } from "./types.js";

export interface Dot {
  trackId: string;
  u: number;
  v: number;
  radius: number;
  color: [number, number, number];
}

interface ActiveDrag {
  trackId: string;
  depth: number;
  u: number;
  v: number;
  moved: boolean;
}

export class DotOverlay {
  private dots = new Map<string, Dot>();
  private drag: ActiveDrag | null = null;
  private intrinsics: Intrinsics;

  constructor(
    intrinsics: Intrinsics,
    private emit: (edit: EditRequest) => void,
  ) {
    this.intrinsics = intrinsics;
  }

  /** Recompute dot positions from the document at the given playhead. */
  refresh(document: SceneDocument, playhead: number): Dot[] {
    this.intrinsics = document.intrinsics;
    this.dots.clear();
    for (const track of document.tracks) {
      if (!track.directional) continue;
      const p = positionAt(track, playhead, document.use_model_positions);
      if (!p) continue;
      const projected = projectPoint(p, this.intrinsics);
      if (!projected) continue;
      const clamped = clampToCanvas(projected.u, projected.v, this.intrinsics.width, this.intrinsics.height);
      this.dots.set(track.id, {
        trackId: track.id,
        u: clamped.u,
        v: clamped.v,
        radius: dotRadius(distanceOf(p)),
        color: track.color,
      });
    }
    return this.visibleDots();
  }

  visibleDots(): Dot[] {
    return [...this.dots.values()];
  }

  /** Topmost dot whose radius covers the point, if any. */
  hitTest(u: number, v: number): string | null {
    let hit: string | null = null;
    for (const dot of this.dots.values()) {
      if (Math.hypot(u - dot.u, v - dot.v) <= dot.radius) hit = dot.trackId;
    }
    return hit;
  }

  pointerDown(document: SceneDocument, playhead: number, u: number, v: number): string | null {
    const trackId = this.hitTest(u, v);
    if (!trackId) return null;
    const track = document.tracks.find((t) => t.id === trackId);
    const p = track ? positionAt(track, playhead, document.use_model_positions) : null;
    if (!p) return null; // dot went stale against a newer document
    this.drag = { trackId, depth: -p[2], u, v, moved: false };
    return trackId;
  }

  pointerMove(u: number, v: number): Dot | null {
    if (!this.drag) return null;
    const clamped = clampToCanvas(u, v, this.intrinsics.width, this.intrinsics.height);
    this.drag.u = clamped.u;
    this.drag.v = clamped.v;
    this.drag.moved = true;
    const dot = this.dots.get(this.drag.trackId);
    if (dot) {
      dot.u = clamped.u;
      dot.v = clamped.v;
    }
    return dot ?? null;
  }

  /** End the drag; emits the single keyframe-upsert for this gesture. */
  pointerUp(playhead: number): EditRequest | null {
    const drag = this.drag;
    this.drag = null;
    if (!drag || !drag.moved) return null;
    const p: Vec3 = unprojectAt(drag.u, drag.v, drag.depth, this.intrinsics);
    const edit: EditRequest = {
      op: "keyframe-upsert",
      track_id: drag.trackId,
      t: playhead,
      p,
      origin: "user",
    };
    this.emit(edit);
    return edit;
  }

  get dragging(): boolean {
    return this.drag !== null;
  }
}
