/**
 * Application controller: one session, one shaded pane, one minimap.
 *
 * Every mutation flows through the HTTP service; the controller's job
 * is sequencing. User splices are sent one at a time in order; pushed
 * events and responses funnel through the same serialized chain so the
 * displayed (text, rects) pair always belongs to a single version.
 */

import {
  ApiRequestError,
  BricsClient,
  type Fetchlike,
  type RectDto,
  type SessionEvent,
  type TreeDto,
} from "./api.js";
import { applySplice, EditorPane, type Splice } from "./editor.js";
import { attachBlockDrag, type PixelRect } from "./drag.js";
import { Minimap } from "./minimap.js";
import { Store } from "./state.js";

export interface AppOptions {
  base: string;
  grammar?: string;
  fetchFn?: Fetchlike;
  charW?: number;
  lineH?: number;
  minimapWidth?: number;
  minimapHeight?: number;
  granularity?: number;
  /** Name dialog; injectable for tests. Defaults to window.prompt. */
  promptName?: (blockId: number) => Promise<string | null>;
}

const DEFAULT_GRANULARITY = 2;

export class App {
  readonly client: BricsClient;
  readonly root: HTMLElement;
  readonly events: SessionEvent[] = [];

  store!: Store;
  editor!: EditorPane;
  minimap!: Minimap;
  tree!: TreeDto;
  slider!: HTMLInputElement;
  dialog!: HTMLElement;
  errorInput!: HTMLInputElement;

  private readonly options: AppOptions;
  private sessionId = "";
  private localText = "";
  private chain: Promise<void> = Promise.resolve();
  private generation = 0;
  private errorLines: number[] = [];
  private eventsAbort = new AbortController();
  private detachDrag: (() => void) | null = null;

  constructor(root: HTMLElement, options: AppOptions) {
    this.root = root;
    this.options = options;
    this.client = new BricsClient(options.base, options.fetchFn);
  }

  get session(): string {
    return this.sessionId;
  }

  async open(text: string): Promise<void> {
    const grammar = this.options.grammar ?? "c";
    const created = await this.client.createSession(text, grammar);
    this.sessionId = created.session_id;
    this.tree = created.tree;
    this.localText = text;
    const rects = await this.client.getRects(this.sessionId);
    this.store = new Store(
      this.sessionId,
      {
        version: created.version,
        text,
        rects: rects.rects,
        diagnostics: created.diagnostics,
      },
      this.options.granularity ?? DEFAULT_GRANULARITY,
    );
    this.mount();
    this.paint(text, rects.rects);
    await this.refreshOverview();
    void this.client
      .openEvents(this.sessionId, (event) => this.onEvent(event), this.eventsAbort.signal)
      .catch(() => {
        // stream ends when the session or app goes away
      });
  }

  destroy(): void {
    this.eventsAbort.abort();
    this.detachDrag?.();
  }

  // ------------------------------------------------------------------ wiring

  private mount(): void {
    this.root.textContent = "";
    const toolbar = document.createElement("div");
    toolbar.className = "brics-toolbar";

    this.slider = document.createElement("input");
    this.slider.type = "range";
    this.slider.className = "brics-granularity";
    this.slider.min = "0";
    this.slider.max = String(Math.max(this.tree.maxDepth, 0));
    this.slider.value = String(this.store.state.granularity);
    this.slider.addEventListener("input", () => {
      void this.setGranularity(Number(this.slider.value));
    });
    toolbar.appendChild(this.slider);

    this.errorInput = document.createElement("input");
    this.errorInput.type = "text";
    this.errorInput.className = "brics-error-input";
    this.errorInput.placeholder = "error lines, comma separated";
    this.errorInput.addEventListener("change", () => {
      const lines = this.errorInput.value
        .split(",")
        .map((part) => parseInt(part.trim(), 10))
        .filter((n) => Number.isFinite(n) && n >= 1);
      void this.setErrorLines(lines);
    });
    toolbar.appendChild(this.errorInput);

    const layout = document.createElement("div");
    layout.className = "brics-layout";
    layout.style.display = "flex";
    const paneHost = document.createElement("div");
    paneHost.className = "brics-pane-host";
    paneHost.style.flex = "1";
    const mapHost = document.createElement("div");
    mapHost.className = "brics-map-host";
    layout.appendChild(paneHost);
    layout.appendChild(mapHost);

    this.dialog = document.createElement("div");
    this.dialog.className = "brics-dialog";
    this.dialog.style.display = "none";

    this.root.appendChild(toolbar);
    this.root.appendChild(layout);
    this.root.appendChild(this.dialog);

    this.editor = new EditorPane(paneHost, {
      charW: this.options.charW,
      lineH: this.options.lineH,
      onSplice: (splice) => this.onSplice(splice),
    });
    this.minimap = new Minimap(mapHost, {
      width: this.options.minimapWidth ?? 120,
      height: this.options.minimapHeight ?? 400,
      onClickLine: (line) => this.editor.scrollToLine(line),
    });
    this.editor.el.addEventListener("scroll", () => this.updateViewport());

    this.detachDrag = attachBlockDrag(this.editor.el, {
      rectAt: (x, y) => this.rectAt(x, y),
      methodRectOf: (blockId) => this.methodRectOf(blockId),
      promptName:
        this.options.promptName ??
        (async () => (typeof prompt === "function" ? prompt("New method name") : null)),
      onExtract: (blockId, name) => void this.extractBlock(blockId, name),
      onDragState: (phase, blockId) => {
        this.store.setDrag(
          phase === "dragging" && blockId !== undefined
            ? { kind: "dragging", blockId, startX: 0, startY: 0 }
            : phase === "naming" && blockId !== undefined
              ? { kind: "naming", blockId }
              : { kind: "none" },
        );
      },
    });
  }

  private paint(text: string, rects: RectDto[]): void {
    this.editor.setDocument(text, rects, this.store.state.diagnostics);
    this.updateViewport();
  }

  private updateViewport(): void {
    const lineH = this.editor.lineH;
    const top = Math.floor(this.editor.el.scrollTop / lineH) + 1;
    const visible = Math.max(1, Math.floor((this.editor.el.clientHeight || 0) / lineH));
    this.minimap.setViewport(top, top + visible - 1);
  }

  // ------------------------------------------------------------- geometry

  /** Deepest server rect under pane-local pixel coordinates. */
  rectAt(x: number, y: number): RectDto | undefined {
    const line = Math.floor(y / this.editor.lineH) + 1;
    const col = Math.floor(x / this.editor.charW);
    let best: RectDto | undefined;
    for (const rect of this.store.state.rects) {
      if (line < rect.topLine || line > rect.bottomLine) continue;
      if (col < rect.leftCol || col >= rect.rightCol) continue;
      if (!best || rect.depth > best.depth) best = rect;
    }
    return best;
  }

  /** Pixel box of the callable ancestor enclosing a block. */
  methodRectOf(blockId: number): PixelRect | undefined {
    const byId = new Map(this.tree.blocks.map((b) => [b.id, b]));
    let node = byId.get(blockId);
    while (node && node.kind !== "callable") {
      node = node.parent === null ? undefined : byId.get(node.parent);
    }
    if (!node) return undefined;
    const id = node.id;
    const rect = this.store.state.rects.find((r) => r.blockId === id);
    return rect ? this.editor.rectPixels(rect) : undefined;
  }

  // ------------------------------------------------------------- sequencing

  private enqueue(step: () => Promise<void>): Promise<void> {
    this.chain = this.chain.then(step, step);
    return this.chain;
  }

  private onSplice(splice: Splice): void {
    this.localText = applySplice(this.localText, splice);
    const generation = this.generation;
    void this.enqueue(() => this.sendEdit(splice, generation));
  }

  private onEvent(event: SessionEvent): void {
    this.events.push(event);
    if (event.version > this.store.state.version && !this.store.state.pendingEdit) {
      void this.enqueue(() => this.syncDocument());
    }
  }

  private async sendEdit(splice: Splice, generation: number): Promise<void> {
    // a refetch invalidated the text this splice was computed against
    if (generation !== this.generation) return;
    this.store.setPendingEdit(true);
    try {
      const snapshot = await this.client.applyEdit(this.sessionId, {
        start_byte: splice.startByte,
        end_byte: splice.endByte,
        replacement: splice.replacement,
        base_version: this.store.state.version,
      });
      this.tree = snapshot.tree;
      await this.commitVersion(snapshot.version);
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === "E_STALE") {
        // someone else won the race: show their state, do not replay
        await this.syncDocument();
      }
      this.surface(error);
    } finally {
      this.store.setPendingEdit(false);
    }
  }

  /** Fetch rects for (at least) the given version and commit a
   * coherent pair; refetches when a newer version raced in between. */
  private async commitVersion(version: number): Promise<void> {
    for (let attempt = 0; attempt < 5; attempt++) {
      const rects = await this.client.getRects(this.sessionId);
      if (rects.version < version) continue;
      if (rects.version === version && version === this.store.state.version + 1) {
        const session = await this.client.getSession(this.sessionId);
        if (session.version !== version) continue;
        this.tree = session.tree;
        this.store.commit({
          version,
          text: session.text,
          rects: rects.rects,
          diagnostics: session.diagnostics,
        });
        this.afterCommit(session.text, rects.rects);
        return;
      }
      // fell behind; take the server's latest instead
      await this.syncDocument();
      return;
    }
    await this.syncDocument();
  }

  /** Refetch the authoritative state and display it (no replay);
   * splices still queued against the abandoned text are dropped. */
  private async syncDocument(): Promise<void> {
    this.generation++;
    for (let attempt = 0; attempt < 5; attempt++) {
      const session = await this.client.getSession(this.sessionId);
      const rects = await this.client.getRects(this.sessionId);
      if (rects.version !== session.version) continue;
      if (session.version > this.store.state.version) {
        this.tree = session.tree;
        this.store.commit(
          {
            version: session.version,
            text: session.text,
            rects: rects.rects,
            diagnostics: session.diagnostics,
          },
          true,
        );
      }
      this.localText = session.text;
      this.afterCommit(session.text, rects.rects, true);
      return;
    }
  }

  private afterCommit(text: string, rects: RectDto[], overwrite = false): void {
    // never clobber keystrokes that are still waiting for their round
    // trip; the pending splice's own commit will repaint
    if (overwrite || text === this.localText) {
      this.paint(text, rects);
    }
    this.slider.max = String(Math.max(this.tree.maxDepth, 0));
    void this.refreshOverview();
  }

  private surface(error: unknown): void {
    const message =
      error instanceof ApiRequestError
        ? `${error.code}: ${error.message}`
        : String(error);
    this.dialog.textContent = message;
    this.dialog.style.display = "block";
  }

  // ------------------------------------------------------------- operations

  async setGranularity(g: number): Promise<void> {
    const max = Math.max(this.tree.maxDepth, 0);
    const clamped = Math.max(0, Math.min(Math.floor(g), max));
    this.store.state.granularity = clamped;
    await this.refreshOverview();
  }

  async setZoom(a: number, b: number): Promise<void> {
    const lines = this.tree.lineCount;
    let from = Math.max(1, Math.min(Math.floor(a), lines));
    let to = Math.max(1, Math.min(Math.floor(b), lines));
    if (from > to) [from, to] = [to, from];
    this.store.setZoom([from, to]);
    await this.refreshOverview();
  }

  async setErrorLines(lines: number[]): Promise<void> {
    this.errorLines = lines;
    await this.refreshOverview();
  }

  async refreshOverview(): Promise<void> {
    const zoom = this.store.state.zoom;
    const model = await this.client.getOverview(this.sessionId, {
      w: this.options.minimapWidth ?? 120,
      h: this.options.minimapHeight ?? 400,
      g: this.store.state.granularity,
      from: zoom?.[0],
      to: zoom?.[1],
      errors: this.errorLines,
    });
    this.store.setOverview(model);
    this.minimap.setModel(model);
    this.updateViewport();
  }

  extractBlock(blockId: number, name: string): Promise<void> {
    const step = () => this.performExtract(blockId, name);
    const next = this.chain.then(step, step);
    this.chain = next;
    return next;
  }

  private async performExtract(blockId: number, name: string): Promise<void> {
    this.store.setPendingEdit(true);
    try {
      const result = await this.client.extract(this.sessionId, blockId, name);
      this.tree = result.tree;
      this.localText = result.text;
      const rects = await this.client.getRects(this.sessionId);
      if (rects.version === result.version) {
        this.store.commit(
          {
            version: result.version,
            text: result.text,
            rects: rects.rects,
            diagnostics: result.diagnostics,
          },
          true,
        );
        this.paint(result.text, rects.rects);
      } else {
        await this.syncDocument();
      }
      this.editor.highlightLines(result.new_method_lines[0], result.new_method_lines[1]);
      void this.refreshOverview();
    } catch (error) {
      this.surface(error);
    } finally {
      this.store.setPendingEdit(false);
    }
  }
}

/** Entry point for index.html: mounts onto #brics-app. */
export async function bootstrap(): Promise<App | null> {
  const host = document.getElementById("brics-app");
  if (!host) return null;
  const params = new URLSearchParams(location.search);
  const app = new App(host, {
    base: params.get("base") ?? "http://127.0.0.1:8787",
    grammar: params.get("grammar") ?? "c",
  });
  const seed =
    "void demo() {\n  int a = 1;\n  int b = 2;\n  if (a > 0) {\n" +
    "    b = a + 1;\n  }\n  return b;\n}\n";
  await app.open(seed);
  return app;
}
