/** Scene document shapes as served by GET /project, and the edit ops. */

export type Vec3 = [number, number, number];

export interface Keyframe {
  t: number;
  p: Vec3;
  origin: "model" | "user";
}

export interface Track {
  id: string;
  label: string;
  color: [number, number, number];
  stem_ref: string;
  gain: number;
  model_keyframes: Keyframe[];
  user_keyframes: Keyframe[];
  directional: boolean;
}

export interface ListenerKeyframe {
  t: number;
  position: Vec3;
  orientation: Vec3; // yaw, pitch, roll radians
}

export interface Intrinsics {
  width: number;
  height: number;
  focal_px: number;
  assumed_hfov: number;
}

export type LayoutId = "mono" | "stereo" | "quad" | "five_one";

export interface SceneDocument {
  video: { width: number; height: number; fps: number; duration: number };
  tracks: Track[];
  listener: { keyframes: ListenerKeyframe[] };
  layout: LayoutId;
  intrinsics: Intrinsics;
  use_model_positions: boolean;
}

export type EditRequest =
  | { op: "keyframe-upsert"; track_id: string; t: number; p: Vec3; origin: "model" | "user" }
  | { op: "keyframe-remove"; track_id: string; t: number; origin: "model" | "user" }
  | {
      op: "track-property";
      track_id: string;
      property: "label" | "gain" | "color" | "stem_ref";
      value: unknown;
    }
  | { op: "listener-pose"; t: number; position: Vec3; orientation: Vec3 }
  | { op: "toggle"; use_model_positions: boolean }
  | { op: "layout"; layout_id: LayoutId };

export interface Violation {
  path: string;
  message: string;
}
