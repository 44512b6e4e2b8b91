/**
 * Overview minimap: the server's already-scaled rectangles drawn as
 * positioned divs, red error lines, and a viewport outline. Clicking
 * maps y back to a line through the model's uniform scale.
 */

import type { OverviewDto } from "./api.js";

export interface MinimapOptions {
  width: number;
  height: number;
  onClickLine?: (line: number) => void;
}

export class Minimap {
  readonly el: HTMLElement;
  private model: OverviewDto | null = null;
  private viewport: HTMLElement | null = null;
  private onClickLine?: (line: number) => void;

  constructor(root: HTMLElement, options: MinimapOptions) {
    this.onClickLine = options.onClickLine;
    this.el = document.createElement("div");
    this.el.className = "brics-minimap";
    this.el.style.position = "relative";
    this.el.style.overflow = "hidden";
    this.el.style.width = `${options.width}px`;
    this.el.style.height = `${options.height}px`;
    this.el.style.background = "#FFFFFF";
    this.el.style.border = "1px solid #BBBBBB";
    this.el.addEventListener("click", (event) => this.handleClick(event));
    root.appendChild(this.el);
  }

  private handleClick(event: MouseEvent): void {
    if (!this.model || !this.onClickLine) return;
    const bounds = this.el.getBoundingClientRect();
    const y = event.clientY - bounds.top;
    const line = Math.floor(y / this.model.scale) + this.model.from;
    this.onClickLine(Math.max(this.model.from, Math.min(line, this.model.to)));
  }

  /** Redraw from a fresh overview model; geometry is used verbatim. */
  setModel(model: OverviewDto): void {
    this.model = model;
    this.el.textContent = "";
    this.viewport = null;
    for (const rect of model.rects) {
      const box = document.createElement("div");
      box.className = "brics-minimap-box";
      box.dataset.blockId = String(rect.blockId);
      box.dataset.depth = String(rect.depth);
      box.style.position = "absolute";
      box.style.left = `${rect.x}px`;
      box.style.top = `${rect.y}px`;
      box.style.width = `${rect.w}px`;
      box.style.height = `${rect.h}px`;
      box.style.backgroundColor = rect.fill;
      box.style.border = `1px solid ${rect.outline}`;
      if (!rect.active) box.classList.add("brics-inactive");
      this.el.appendChild(box);
    }
    for (const y of model.errorLines) {
      const mark = document.createElement("div");
      mark.className = "brics-error-line";
      mark.style.position = "absolute";
      mark.style.left = "0";
      mark.style.right = "0";
      mark.style.top = `${y}px`;
      mark.style.height = "2px";
      mark.style.backgroundColor = model.errorColor;
      this.el.appendChild(mark);
    }
  }

  /** Outline the editor's visible line range on the minimap. */
  setViewport(fromLine: number, toLine: number): void {
    if (!this.model) return;
    if (!this.viewport) {
      this.viewport = document.createElement("div");
      this.viewport.className = "brics-viewport";
      this.viewport.style.position = "absolute";
      this.viewport.style.left = "0";
      this.viewport.style.right = "0";
      this.viewport.style.border = "1px solid #3366CC";
      this.viewport.style.pointerEvents = "none";
      this.el.appendChild(this.viewport);
    }
    const top = (fromLine - this.model.from) * this.model.scale;
    const height = (toLine - fromLine + 1) * this.model.scale;
    this.viewport.style.top = `${top}px`;
    this.viewport.style.height = `${height}px`;
  }

  get boxCount(): number {
    return this.el.querySelectorAll(".brics-minimap-box").length;
  }
}
