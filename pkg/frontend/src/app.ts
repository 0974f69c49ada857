/** Browser entry point: wires the three panels to the engine service.
 *
 * Layout mirrors the editing workflow: the video panel with the dot
 * overlay and transport on one side, the simulated-3D panel beside it, and
 * the per-track audio properties underneath. The video element plays the
 * original file muted and is nudged to the stream playhead once it drifts
 * more than a block; all audio comes from the preview stream.
 */

import { EngineClient } from "./client.js";
import { DotOverlay } from "./dotOverlay.js";
import { MeterModel } from "./meters.js";
import { numericPositionEdit, rebindEdits, trackSummary, volumeEdit } from "./panel.js";
import { StreamPlayer } from "./playback.js";
import { decodeFrame, transport } from "./protocol.js";
import { Scene3DPanel } from "./scene3d.js";
import type { EditRequest, SceneDocument } from "./types.js";

interface AppElements {
  video: HTMLVideoElement;
  overlayCanvas: HTMLCanvasElement;
  sceneCanvas: HTMLCanvasElement;
  meters: HTMLElement;
  tracks: HTMLElement;
  status: HTMLElement;
  playButton: HTMLButtonElement;
  prevButton: HTMLButtonElement;
  nextButton: HTMLButtonElement;
  layoutSelect: HTMLSelectElement;
  toggleModel: HTMLInputElement;
}

export class EditorApp {
  private client: EngineClient;
  private overlay: DotOverlay;
  private scene3d: Scene3DPanel;
  private metersModel = new MeterModel();
  private player = new StreamPlayer();
  private socket: WebSocket | null = null;
  private document_: SceneDocument | null = null;
  private playhead = 0;
  private playing = true;
  private sampleRate = 48000;

  constructor(
    baseUrl: string,
    private el: AppElements,
  ) {
    this.client = new EngineClient(baseUrl);
    const emit = (edit: EditRequest) => void this.submitEdit(edit);
    this.overlay = new DotOverlay(
      { width: 1, height: 1, focal_px: 1, assumed_hfov: 1 },
      emit,
    );
    this.scene3d = new Scene3DPanel(emit);
  }

  async start(): Promise<void> {
    this.document_ = await this.client.getProject();
    this.el.layoutSelect.value = this.document_.layout;
    this.el.toggleModel.checked = this.document_.use_model_positions;
    this.bindControls();
    this.renderTrackPanel();
    this.connectStream();
  }

  private bindControls(): void {
    const send = (command: string) => this.socket?.send(command);
    this.el.playButton.onclick = () => {
      this.playing = !this.playing;
      send(this.playing ? transport.play() : transport.pause());
      this.el.playButton.textContent = this.playing ? "pause" : "play";
      if (this.playing) void this.el.video.play();
      else this.el.video.pause();
    };
    this.el.prevButton.onclick = () => send(transport.prevSecond());
    this.el.nextButton.onclick = () => send(transport.nextSecond());
    this.el.layoutSelect.onchange = () =>
      void this.submitEdit({
        op: "layout",
        layout_id: this.el.layoutSelect.value as SceneDocument["layout"],
      });
    this.el.toggleModel.onchange = () =>
      void this.submitEdit({ op: "toggle", use_model_positions: this.el.toggleModel.checked });

    const canvas = this.el.overlayCanvas;
    const toVideoPx = (event: PointerEvent) => {
      const rect = canvas.getBoundingClientRect();
      const doc = this.document_!;
      return {
        u: ((event.clientX - rect.left) / rect.width) * doc.video.width,
        v: ((event.clientY - rect.top) / rect.height) * doc.video.height,
      };
    };
    canvas.onpointerdown = (event) => {
      if (!this.document_) return;
      const { u, v } = toVideoPx(event);
      if (this.overlay.pointerDown(this.document_, this.playhead, u, v)) {
        canvas.setPointerCapture(event.pointerId);
      }
    };
    canvas.onpointermove = (event) => {
      if (!this.overlay.dragging) return;
      const { u, v } = toVideoPx(event);
      this.overlay.pointerMove(u, v);
      this.drawOverlay();
    };
    canvas.onpointerup = () => void this.overlay.pointerUp(this.playhead);
  }

  private async submitEdit(edit: EditRequest): Promise<void> {
    const outcome = await this.client.applyEdit(edit);
    if (!outcome.ok) {
      const details = (outcome.violations ?? []).map((v) => `${v.path}: ${v.message}`).join("; ");
      this.toast(`edit rejected: ${details || "validation failed"}`);
    }
    // Success or revert, the server document is the truth; refresh.
    this.document_ = await this.client.getProject();
    this.renderTrackPanel();
    this.drawOverlay();
    this.drawScene();
  }

  private connectStream(): void {
    const socket = new WebSocket(this.client.previewUrl(0));
    socket.binaryType = "arraybuffer";
    socket.onmessage = (event) => {
      const frame = decodeFrame(event.data as ArrayBuffer);
      this.playhead = frame.playhead;
      if (frame.frames > 0) {
        this.player.play(frame, this.sampleRate);
        // Re-sync the muted original video once it drifts beyond ~a block.
        if (Math.abs(this.el.video.currentTime - frame.playhead) > 0.05) {
          this.el.video.currentTime = frame.playhead;
        }
      }
      this.drawMeters(this.metersModel.update(frame.rms, performance.now()));
      this.drawOverlay();
      this.drawScene();
    };
    socket.onclose = () => this.toast("preview stream closed");
    this.socket = socket;
  }

  private drawOverlay(): void {
    if (!this.document_) return;
    const doc = this.document_;
    const canvas = this.el.overlayCanvas;
    canvas.width = doc.video.width;
    canvas.height = doc.video.height;
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    for (const dot of this.overlay.refresh(doc, this.playhead)) {
      ctx.beginPath();
      ctx.arc(dot.u, dot.v, dot.radius, 0, 2 * Math.PI);
      ctx.fillStyle = `rgba(${dot.color[0]}, ${dot.color[1]}, ${dot.color[2]}, 0.55)`;
      ctx.fill();
      ctx.strokeStyle = `rgb(${dot.color[0]}, ${dot.color[1]}, ${dot.color[2]})`;
      ctx.stroke();
    }
  }

  /** Top-down scene view: spheres as circles, the camera as a wedge. */
  private drawScene(): void {
    if (!this.document_) return;
    const doc = this.document_;
    const canvas = this.el.sceneCanvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const scale = canvas.width / (2 * this.scene3d.view.zoom);
    const yaw = this.scene3d.view.orbitYaw;
    const toCanvas = (x: number, z: number) => {
      const rx = x * Math.cos(yaw) - z * Math.sin(yaw);
      const rz = x * Math.sin(yaw) + z * Math.cos(yaw);
      return { cx: canvas.width / 2 + rx * scale, cy: canvas.height / 2 + rz * scale };
    };
    for (const track of doc.tracks) {
      if (!track.directional) continue;
      const kfs = doc.use_model_positions
        ? track.model_keyframes.concat(track.user_keyframes)
        : track.user_keyframes;
      if (!kfs.length) continue;
      const p = kfs[kfs.length - 1].p;
      const { cx, cy } = toCanvas(p[0], p[2]);
      ctx.beginPath();
      ctx.arc(cx, cy, 10, 0, 2 * Math.PI);
      ctx.fillStyle = `rgb(${track.color[0]}, ${track.color[1]}, ${track.color[2]})`;
      ctx.fill();
    }
    const pose = this.scene3d.cameraPose(doc, this.playhead);
    const { cx, cy } = toCanvas(pose.position[0], pose.position[2]);
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    const facing = -pose.yaw + yaw; // camera looks down -z
    ctx.lineTo(cx + 16 * Math.sin(facing - 0.4), cy - 16 * Math.cos(facing - 0.4));
    ctx.lineTo(cx + 16 * Math.sin(facing + 0.4), cy - 16 * Math.cos(facing + 0.4));
    ctx.closePath();
    ctx.fillStyle = "#555";
    ctx.fill();
  }

  private drawMeters(values: number[]): void {
    const holder = this.el.meters;
    while (holder.children.length < values.length) {
      const bar = document.createElement("div");
      bar.className = "meter-bar";
      holder.appendChild(bar);
    }
    while (holder.children.length > values.length) holder.removeChild(holder.lastChild!);
    values.forEach((value, i) => {
      const bar = holder.children[i] as HTMLElement;
      bar.style.height = `${Math.min(value, 1) * 100}%`;
    });
  }

  private renderTrackPanel(): void {
    if (!this.document_) return;
    const doc = this.document_;
    const holder = this.el.tracks;
    holder.textContent = "";
    for (const track of doc.tracks) {
      const row = document.createElement("div");
      row.className = "track-row";

      const name = document.createElement("select");
      for (const label of new Set(doc.tracks.map((t) => t.label))) {
        const option = document.createElement("option");
        option.value = option.textContent = label;
        name.appendChild(option);
      }
      name.value = track.label;
      name.onchange = () => {
        for (const edit of rebindEdits(doc, track.id, name.value)) void this.submitEdit(edit);
      };

      const volume = document.createElement("input");
      volume.type = "range";
      volume.min = "0";
      volume.max = "4";
      volume.step = "0.01";
      volume.value = String(track.gain);
      volume.oninput = () => {
        const edit = volumeEdit(track.id, Number(volume.value));
        if (edit) void this.submitEdit(edit);
      };

      const numeric = document.createElement("input");
      numeric.type = "text";
      numeric.placeholder = "x, y, z";
      numeric.onchange = () => {
        const parts = numeric.value.split(",").map((s) => s.trim());
        if (parts.length !== 3) return this.toast("expected x, y, z");
        const edit = numericPositionEdit(track.id, this.playhead, [parts[0], parts[1], parts[2]]);
        if (edit) void this.submitEdit(edit);
        else this.toast("invalid coordinates");
      };

      const caption = document.createElement("span");
      caption.textContent = trackSummary(track);

      row.append(name, volume, numeric, caption);
      holder.appendChild(row);
    }
  }

  private toast(message: string): void {
    this.el.status.textContent = message;
  }
}
