/** Simulated-3D manipulation panel state.
 *
 * Two very different kinds of interaction share this panel: orbiting the
 * VIEW (camera of the widget itself) which must never touch the scene, and
 * manipulating OBJECTS (track spheres or the listener's camera object)
 * which emits edits. Sphere moves carry full xyz, so depth is editable
 * here, unlike the 2D overlay.
 */

import { poseAt, type Pose } from "./position.js";
import type { EditRequest, SceneDocument, Vec3 } from "./types.js";

export type ManipulationMode = "move" | "rotate";

export interface ViewTransform {
  orbitYaw: number;
  orbitPitch: number;
  zoom: number;
}

export class Scene3DPanel {
  mode: ManipulationMode = "move";
  view: ViewTransform = { orbitYaw: 0, orbitPitch: 0.3, zoom: 8 };

  constructor(private emit: (edit: EditRequest) => void) {}

  /** Rotate or zoom the view only. Never emits an edit. */
  orbitView(deltaYaw: number, deltaPitch: number, deltaZoom = 0): ViewTransform {
    this.view = {
      orbitYaw: this.view.orbitYaw + deltaYaw,
      orbitPitch: Math.min(Math.max(this.view.orbitPitch + deltaPitch, -1.5), 1.5),
      zoom: Math.min(Math.max(this.view.zoom * Math.pow(1.1, deltaZoom), 1), 50),
    };
    return this.view;
  }

  /** Move a track sphere: full xyz goes into a user keyframe at the playhead. */
  moveObject(document: SceneDocument, trackId: string, playhead: number, to: Vec3): EditRequest {
    const edit: EditRequest = {
      op: "keyframe-upsert",
      track_id: trackId,
      t: playhead,
      p: to,
      origin: "user",
    };
    this.emit(edit);
    return edit;
  }

  cameraPose(document: SceneDocument, playhead: number): Pose {
    return poseAt(document.listener.keyframes, playhead);
  }

  /** Translate the camera object (the point of recording). */
  moveCamera(document: SceneDocument, playhead: number, delta: Vec3): EditRequest {
    const pose = this.cameraPose(document, playhead);
    const edit: EditRequest = {
      op: "listener-pose",
      t: playhead,
      position: [
        pose.position[0] + delta[0],
        pose.position[1] + delta[1],
        pose.position[2] + delta[2],
      ],
      orientation: [pose.yaw, pose.pitch, pose.roll],
    };
    this.emit(edit);
    return edit;
  }

  /** Rotate the camera object; angles are radians added to the current pose. */
  rotateCamera(document: SceneDocument, playhead: number, delta: Vec3): EditRequest {
    const pose = this.cameraPose(document, playhead);
    const edit: EditRequest = {
      op: "listener-pose",
      t: playhead,
      position: pose.position,
      orientation: [pose.yaw + delta[0], pose.pitch + delta[1], pose.roll + delta[2]],
    };
    this.emit(edit);
    return edit;
  }
}
