/**
 * Single source of truth for what the UI is showing.
 *
 * The hard rule is version coherence: text and rects are only ever
 * swapped in together, as a pair fetched for the same version, so the
 * pane never paints boxes from one version over text of another.
 */

import type { Diagnostic, OverviewDto, RectDto } from "./api.js";

export type DragState =
  | { kind: "none" }
  | { kind: "dragging"; blockId: number; startX: number; startY: number }
  | { kind: "naming"; blockId: number };

export interface ViewState {
  sessionId: string;
  text: string;
  version: number;
  rects: RectDto[];
  diagnostics: Diagnostic[];
  overview: OverviewDto | null;
  granularity: number;
  zoom: [number, number] | null;
  folds: Set<number>;
  drag: DragState;
  pendingEdit: boolean;
}

export interface Commit {
  version: number;
  text: string;
  rects: RectDto[];
  diagnostics: Diagnostic[];
}

export type Listener = (state: ViewState) => void;

export class Store {
  private listeners: Listener[] = [];
  readonly state: ViewState;
  private queued = new Map<number, Commit>();

  constructor(sessionId: string, initial: Commit, granularity = 2) {
    this.state = {
      sessionId,
      text: initial.text,
      version: initial.version,
      rects: initial.rects,
      diagnostics: initial.diagnostics,
      overview: null,
      granularity,
      zoom: null,
      folds: new Set(),
      drag: { kind: "none" },
      pendingEdit: false,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const i = this.listeners.indexOf(listener);
      if (i >= 0) this.listeners.splice(i, 1);
    };
  }

  private notify(): void {
    for (const listener of [...this.listeners]) listener(this.state);
  }

  /**
   * Swap in a coherent (version, text, rects) triple. Older or
   * same-version commits are dropped; a commit that skips ahead is
   * queued until the gap fills, unless force is set (used after a
   * refetch, where intermediate versions are unobservable).
   */
  commit(c: Commit, force = false): boolean {
    if (c.version <= this.state.version) return false;
    if (!force && c.version !== this.state.version + 1) {
      this.queued.set(c.version, c);
      return false;
    }
    this.apply(c);
    let next = this.queued.get(this.state.version + 1);
    while (next) {
      this.queued.delete(next.version);
      this.apply(next);
      next = this.queued.get(this.state.version + 1);
    }
    for (const version of [...this.queued.keys()]) {
      if (version <= this.state.version) this.queued.delete(version);
    }
    this.notify();
    return true;
  }

  private apply(c: Commit): void {
    this.state.version = c.version;
    this.state.text = c.text;
    this.state.rects = c.rects;
    this.state.diagnostics = c.diagnostics;
  }

  setOverview(model: OverviewDto): void {
    // a model computed for an older version must not replace a newer one
    if (this.state.overview && model.version < this.state.overview.version) return;
    this.state.overview = model;
    this.state.granularity = model.granularity;
    this.notify();
  }

  setZoom(zoom: [number, number] | null): void {
    this.state.zoom = zoom;
    this.notify();
  }

  setPendingEdit(pending: boolean): void {
    this.state.pendingEdit = pending;
    this.notify();
  }

  /** At most one drag is in progress; starting a new one while another
   * is active is a programming error surfaced early. */
  setDrag(drag: DragState): void {
    if (drag.kind === "dragging" && this.state.drag.kind !== "none") {
      throw new Error("drag already in progress");
    }
    this.state.drag = drag;
    this.notify();
  }

  toggleFold(blockId: number): void {
    if (this.state.folds.has(blockId)) this.state.folds.delete(blockId);
    else this.state.folds.add(blockId);
    this.notify();
  }
}
