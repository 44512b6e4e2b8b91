/**
 * Drag-a-block-out-of-its-method gesture.
 *
 * Alt+pointerdown grabs the deepest block under the pointer; releasing
 * more than 24 px outside the enclosing method's box asks for a name
 * and requests the extraction. Releasing inside (or within the
 * threshold) issues no request at all.
 */

import type { RectDto } from "./api.js";

export const DRAG_OUT_THRESHOLD_PX = 24;

export interface PixelRect {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

/** Euclidean distance from a point to a rectangle; 0 inside. */
export function distanceOutside(rect: PixelRect, x: number, y: number): number {
  const dx = Math.max(rect.left - x, 0, x - rect.right);
  const dy = Math.max(rect.top - y, 0, y - rect.bottom);
  return Math.hypot(dx, dy);
}

export type DragPhase = "none" | "dragging" | "naming";

export interface DragDeps {
  /** Deepest block rect at pane-local pixel coordinates, if any. */
  rectAt(x: number, y: number): RectDto | undefined;
  /** Pixel box of the method enclosing the block (or of the block's
   * outermost callable ancestor); undefined blocks the gesture. */
  methodRectOf(blockId: number): PixelRect | undefined;
  /** Ask the user for the new method name; null cancels. */
  promptName(blockId: number): Promise<string | null>;
  onExtract(blockId: number, name: string): void;
  onDragState?(phase: DragPhase, blockId?: number): void;
  threshold?: number;
}

interface ActiveDrag {
  blockId: number;
  pointerId: number;
}

/**
 * Wire the gesture onto a pane element. Pointer coordinates are taken
 * relative to the pane's bounding box. Returns a detach function.
 */
export function attachBlockDrag(pane: HTMLElement, deps: DragDeps): () => void {
  const threshold = deps.threshold ?? DRAG_OUT_THRESHOLD_PX;
  let active: ActiveDrag | null = null;
  let naming = false;

  function localPoint(event: PointerEvent): { x: number; y: number } {
    const bounds = pane.getBoundingClientRect();
    return { x: event.clientX - bounds.left, y: event.clientY - bounds.top };
  }

  function onDown(event: PointerEvent): void {
    if (!event.altKey || active || naming) return;
    const { x, y } = localPoint(event);
    const rect = deps.rectAt(x, y);
    if (!rect) return;
    active = { blockId: rect.blockId, pointerId: event.pointerId };
    deps.onDragState?.("dragging", rect.blockId);
    event.preventDefault();
  }

  async function onUp(event: PointerEvent): Promise<void> {
    if (!active || event.pointerId !== active.pointerId) return;
    const drag = active;
    active = null;
    const method = deps.methodRectOf(drag.blockId);
    const { x, y } = localPoint(event);
    if (!method || distanceOutside(method, x, y) <= threshold) {
      deps.onDragState?.("none", drag.blockId); // dropped back in
      return;
    }
    naming = true;
    deps.onDragState?.("naming", drag.blockId);
    try {
      const name = await deps.promptName(drag.blockId);
      if (name !== null && name !== "") deps.onExtract(drag.blockId, name);
    } finally {
      naming = false;
      deps.onDragState?.("none", drag.blockId);
    }
  }

  function onCancel(event: PointerEvent): void {
    if (!active || event.pointerId !== active.pointerId) return;
    const blockId = active.blockId;
    active = null;
    deps.onDragState?.("none", blockId);
  }

  pane.addEventListener("pointerdown", onDown);
  pane.addEventListener("pointerup", onUp as (e: PointerEvent) => void);
  pane.addEventListener("pointercancel", onCancel);
  return () => {
    pane.removeEventListener("pointerdown", onDown);
    pane.removeEventListener("pointerup", onUp as (e: PointerEvent) => void);
    pane.removeEventListener("pointercancel", onCancel);
  };
}
