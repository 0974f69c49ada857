import { EditorApp } from "./app.js";

const byId = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const app = new EditorApp(window.location.origin.replace(/:\d+$/, ":8000"), {
  video: byId<HTMLVideoElement>("video"),
  overlayCanvas: byId<HTMLCanvasElement>("overlay"),
  sceneCanvas: byId<HTMLCanvasElement>("scene3d"),
  meters: byId("meters"),
  tracks: byId("tracks"),
  status: byId("status"),
  playButton: byId<HTMLButtonElement>("play"),
  prevButton: byId<HTMLButtonElement>("prev-second"),
  nextButton: byId<HTMLButtonElement>("next-second"),
  layoutSelect: byId<HTMLSelectElement>("layout"),
  toggleModel: byId<HTMLInputElement>("toggle-model"),
});

app.start().catch((error) => {
  byId("status").textContent = `failed to start: ${error}`;
});
