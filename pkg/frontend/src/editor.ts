/**
 * Editable code pane with nested block shading.
 *
 * A plain textarea sits on top of an absolutely positioned layer of
 * box divs. The boxes are painted purely from server rectangles
 * (character grid coordinates times a fixed cell size); the pane never
 * derives block extents from the text itself.
 */

import type { Diagnostic, RectDto } from "./api.js";

export interface Splice {
  startByte: number;
  endByte: number;
  replacement: string;
}

export interface EditorOptions {
  charW?: number;
  lineH?: number;
  onSplice?: (splice: Splice) => void;
}

const encoder = new TextEncoder();

function byteLength(text: string): number {
  return encoder.encode(text).length;
}

function isLowSurrogate(code: number): boolean {
  return code >= 0xdc00 && code <= 0xdfff;
}

/**
 * Reduce an old/new buffer pair to one splice: longest common prefix
 * and suffix in UTF-16 units, trimmed back so neither cut lands inside
 * a surrogate pair, with offsets converted to UTF-8 bytes of the old
 * text (the wire protocol splices bytes).
 */
export function diffToSplice(oldText: string, newText: string): Splice | null {
  if (oldText === newText) return null;
  let prefix = 0;
  const maxPrefix = Math.min(oldText.length, newText.length);
  while (prefix < maxPrefix && oldText[prefix] === newText[prefix]) prefix++;
  if (prefix > 0 && (isLowSurrogate(oldText.charCodeAt(prefix)) ||
      isLowSurrogate(newText.charCodeAt(prefix)))) {
    prefix--;
  }
  let suffix = 0;
  const maxSuffix = Math.min(oldText.length, newText.length) - prefix;
  while (
    suffix < maxSuffix &&
    oldText[oldText.length - 1 - suffix] === newText[newText.length - 1 - suffix]
  ) {
    suffix++;
  }
  if (isLowSurrogate(oldText.charCodeAt(oldText.length - suffix)) &&
      suffix > 0) {
    suffix--;
  }
  const startByte = byteLength(oldText.slice(0, prefix));
  const endByte = startByte + byteLength(oldText.slice(prefix, oldText.length - suffix));
  return {
    startByte,
    endByte,
    replacement: newText.slice(prefix, newText.length - suffix),
  };
}

/** Apply a byte splice to a string the way the server does. */
export function applySplice(text: string, splice: Splice): string {
  const bytes = encoder.encode(text);
  const head = bytes.slice(0, splice.startByte);
  const tail = bytes.slice(splice.endByte);
  const mid = encoder.encode(splice.replacement);
  const merged = new Uint8Array(head.length + mid.length + tail.length);
  merged.set(head, 0);
  merged.set(mid, head.length);
  merged.set(tail, head.length + mid.length);
  return new TextDecoder("utf-8").decode(merged);
}

export class EditorPane {
  readonly el: HTMLElement;
  readonly boxes: HTMLElement;
  readonly input: HTMLTextAreaElement;
  readonly diags: HTMLElement;
  readonly charW: number;
  readonly lineH: number;

  private lastText = "";
  private suppressInput = false;
  private highlightBox: HTMLElement | null = null;
  private onSplice?: (splice: Splice) => void;

  constructor(root: HTMLElement, options: EditorOptions = {}) {
    this.charW = options.charW ?? 8;
    this.lineH = options.lineH ?? 16;
    this.onSplice = options.onSplice;

    this.el = document.createElement("div");
    this.el.className = "brics-editor";
    this.el.style.position = "relative";

    this.boxes = document.createElement("div");
    this.boxes.className = "brics-boxes";
    this.boxes.style.position = "absolute";
    this.boxes.style.inset = "0";
    // background layer only; the textarea above takes all input
    this.boxes.style.pointerEvents = "none";

    this.input = document.createElement("textarea");
    this.input.className = "brics-input";
    this.input.spellcheck = false;
    this.input.style.position = "relative";
    this.input.style.background = "transparent";
    this.input.style.font = `${this.lineH - 3}px/${this.lineH}px monospace`;
    this.input.style.width = "100%";
    this.input.style.border = "none";
    this.input.addEventListener("input", () => this.handleInput());

    this.diags = document.createElement("div");
    this.diags.className = "brics-diagnostics";

    this.el.appendChild(this.boxes);
    this.el.appendChild(this.input);
    root.appendChild(this.el);
    root.appendChild(this.diags);
  }

  private handleInput(): void {
    if (this.suppressInput) return;
    // delta since the previous input event, so rapid keystrokes each
    // produce exactly one splice against the text the last one made
    const splice = diffToSplice(this.lastText, this.input.value);
    this.lastText = this.input.value;
    if (splice && this.onSplice) this.onSplice(splice);
  }

  /** Paint a coherent document: text, boxes, and diagnostics together. */
  setDocument(text: string, rects: RectDto[], diagnostics: Diagnostic[]): void {
    this.lastText = text;
    if (this.input.value !== text) {
      this.suppressInput = true;
      this.input.value = text;
      this.suppressInput = false;
    }
    const lineCount = text.split("\n").length;
    this.input.rows = lineCount + 1;
    this.el.style.minHeight = `${lineCount * this.lineH}px`;
    this.renderBoxes(rects);
    this.renderDiagnostics(diagnostics);
  }

  private renderBoxes(rects: RectDto[]): void {
    this.boxes.textContent = "";
    this.highlightBox = null;
    for (const rect of rects) {
      const box = document.createElement("div");
      box.className = "brics-box";
      box.dataset.blockId = String(rect.blockId);
      box.dataset.depth = String(rect.depth);
      box.style.position = "absolute";
      box.style.left = `${rect.leftCol * this.charW}px`;
      box.style.top = `${(rect.topLine - 1) * this.lineH}px`;
      box.style.width = `${(rect.rightCol - rect.leftCol) * this.charW}px`;
      box.style.height = `${(rect.bottomLine - rect.topLine + 1) * this.lineH}px`;
      box.style.backgroundColor = rect.fill;
      box.style.border = `1px solid ${rect.outline}`;
      if (!rect.active) box.classList.add("brics-inactive");
      this.boxes.appendChild(box);
    }
  }

  private renderDiagnostics(diagnostics: Diagnostic[]): void {
    this.diags.textContent = "";
    for (const d of diagnostics) {
      const row = document.createElement("div");
      row.className = "brics-diagnostic";
      row.textContent = `${d.line}:${d.col}: ${d.code}: ${d.message}`;
      this.diags.appendChild(row);
    }
  }

  get text(): string {
    return this.input.value;
  }

  /** Pixel rect of a block box, pane-local; geometry echoes the server. */
  rectPixels(rect: RectDto): { left: number; top: number; right: number; bottom: number } {
    return {
      left: rect.leftCol * this.charW,
      top: (rect.topLine - 1) * this.lineH,
      right: rect.rightCol * this.charW,
      bottom: rect.bottomLine * this.lineH,
    };
  }

  scrollToLine(line: number): void {
    this.el.scrollTop = (line - 1) * this.lineH;
  }

  /** Flash a line range (the freshly extracted method) for two seconds. */
  highlightLines(first: number, last: number, durationMs = 2000): void {
    if (this.highlightBox) this.highlightBox.remove();
    const box = document.createElement("div");
    box.className = "brics-highlight";
    box.style.position = "absolute";
    box.style.left = "0";
    box.style.right = "0";
    box.style.top = `${(first - 1) * this.lineH}px`;
    box.style.height = `${(last - first + 1) * this.lineH}px`;
    box.style.backgroundColor = "rgba(255, 235, 59, 0.35)";
    box.style.pointerEvents = "none";
    this.boxes.appendChild(box);
    this.highlightBox = box;
    setTimeout(() => {
      if (this.highlightBox === box) this.highlightBox = null;
      box.remove();
    }, durationMs);
  }
}
