// Mouse-based drag plumbing (same approach as the mood-board drag): chips set
// a shared drag payload on mousedown; drop targets read it on mouseup; the
// document-level mouseup (which fires last in the bubble) clears it.

import { KeywordDto } from "./types.js";

export interface DragContext {
  keyword: KeywordDto | null;
}

export function createDragContext(): DragContext {
  const context: DragContext = { keyword: null };
  document.addEventListener("mouseup", () => {
    context.keyword = null;
  });
  return context;
}

export function makeChipDraggable(
  chip: HTMLElement,
  keyword: KeywordDto,
  context: DragContext,
): void {
  chip.classList.add("draggable");
  chip.addEventListener("mousedown", (event) => {
    if (event.button !== 0) return;
    context.keyword = keyword;
    chip.classList.add("dragging");
    event.preventDefault();
  });
  document.addEventListener("mouseup", () => chip.classList.remove("dragging"));
}

export function makeDropTarget(
  node: HTMLElement,
  context: DragContext,
  onDrop: (keyword: KeywordDto) => void,
): void {
  node.addEventListener("mouseup", () => {
    if (context.keyword) {
      const dropped = context.keyword;
      context.keyword = null;
      onDrop(dropped);
    }
  });
}

// Free placement of reference cards: drag moves the element, the callback
// persists the final position.
export function makeCardMovable(
  card: HTMLElement,
  onMoved: (x: number, y: number) => void,
): void {
  let startX = 0;
  let startY = 0;
  let originLeft = 0;
  let originTop = 0;
  let moved = false;

  const onMouseMove = (event: MouseEvent) => {
    const dx = event.clientX - startX;
    const dy = event.clientY - startY;
    if (dx !== 0 || dy !== 0) moved = true;
    card.style.left = `${originLeft + dx}px`;
    card.style.top = `${originTop + dy}px`;
  };

  const onMouseUp = () => {
    document.removeEventListener("mousemove", onMouseMove);
    document.removeEventListener("mouseup", onMouseUp);
    if (moved) {
      onMoved(parseFloat(card.style.left) || 0, parseFloat(card.style.top) || 0);
    }
  };

  card.addEventListener("mousedown", (event) => {
    if (event.button !== 0) return;
    if ((event.target as HTMLElement).classList.contains("chip")) return;
    startX = event.clientX;
    startY = event.clientY;
    originLeft = parseFloat(card.style.left) || 0;
    originTop = parseFloat(card.style.top) || 0;
    moved = false;
    document.addEventListener("mousemove", onMouseMove);
    document.addEventListener("mouseup", onMouseUp);
    event.preventDefault();
  });
}
