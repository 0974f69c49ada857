/** HTTP client for the engine: versioned edits through one ordered queue.
 *
 * Every edit waits for the previous one (the panel, overlay and 3D panel
 * all funnel through here), carries the tracked base version, and on a
 * version conflict refreshes once and retries, which is enough for a
 * single-user editor sharing the engine with nothing but itself.
 */

import type { EditRequest, SceneDocument, Violation } from "./types.js";

export interface EditOutcome {
  ok: boolean;
  version?: number;
  violations?: Violation[];
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class EngineClient {
  private queue: Promise<unknown> = Promise.resolve();
  version = 0;

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async getProject(): Promise<SceneDocument> {
    const response = await this.fetchImpl(`${this.baseUrl}/project`);
    if (!response.ok) throw new Error(`GET /project failed: ${response.status}`);
    this.version = Number(response.headers.get("x-project-version") ?? this.version);
    return (await response.json()) as SceneDocument;
  }

  async loadProject(path: string): Promise<number> {
    return this.load({ project: path });
  }

  async loadBundle(path: string, layout?: string): Promise<number> {
    return this.load(layout ? { bundle: path, layout } : { bundle: path });
  }

  private async load(body: Record<string, string>): Promise<number> {
    const response = await this.fetchImpl(`${this.baseUrl}/project`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw new Error(`POST /project failed: ${response.status}`);
    const data = (await response.json()) as { version: number };
    this.version = data.version;
    return data.version;
  }

  /** Queue one edit; resolves with the outcome after it reached the server. */
  applyEdit(edit: EditRequest): Promise<EditOutcome> {
    const run = this.queue.then(() => this.send(edit));
    // Keep the chain alive whether or not this edit succeeds.
    this.queue = run.catch(() => undefined);
    return run;
  }

  private async send(edit: EditRequest, retried = false): Promise<EditOutcome> {
    const response = await this.fetchImpl(`${this.baseUrl}/edits`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...edit, base_version: this.version }),
    });
    if (response.ok) {
      const data = (await response.json()) as { version: number };
      this.version = data.version;
      return { ok: true, version: data.version };
    }
    if (response.status === 409 && !retried) {
      const data = (await response.json()) as { detail?: { head?: number } };
      this.version = data.detail?.head ?? this.version;
      return this.send(edit, true);
    }
    if (response.status === 422) {
      const data = (await response.json()) as { detail?: { violations?: Violation[] } };
      return { ok: false, violations: data.detail?.violations ?? [] };
    }
    throw new Error(`PATCH /edits failed: ${response.status}`);
  }

  renderUrl(layout?: string, bits = 32): string {
    const params = new URLSearchParams();
    if (layout) params.set("layout", layout);
    params.set("bits", String(bits));
    return `${this.baseUrl}/render?${params.toString()}`;
  }

  async render(layout?: string, bits = 32): Promise<ArrayBuffer> {
    const response = await this.fetchImpl(this.renderUrl(layout, bits), { method: "POST" });
    if (!response.ok) throw new Error(`POST /render failed: ${response.status}`);
    return response.arrayBuffer();
  }

  previewUrl(from = 0, layout?: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    const params = new URLSearchParams({ from: String(from) });
    if (layout) params.set("layout", layout);
    return `${ws}/preview?${params.toString()}`;
  }
}
