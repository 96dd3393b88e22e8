// The three panels: keyword extraction, the interactive mood board with the
// suggestion strip, and the merge panel with draft cards.

import { BoardApi } from "./api.js";
import { el } from "./dom.js";
import { DragContext, makeCardMovable, makeChipDraggable, makeDropTarget } from "./dragdrop.js";
import { BoardDto, CATEGORIES, Category, DraftDto, KeywordDto, ReferenceDto } from "./types.js";

export interface PanelHandlers {
  upload(file: File): void;
  toggleSelect(keyword: KeywordDto): void;
  dropSuggested(keyword: KeywordDto): void;
  recommend(): void;
  merge(): void;
  moreSketches(draft: DraftDto): void;
  moveReference(ref: ReferenceDto, x: number, y: number): void;
}

const slug = (category: Category) => category.replace(/ & /g, "-").replace(/ /g, "-");

const chipLabel = (keyword: KeywordDto) =>
  keyword.category === "arrangement" ? "arrangement" : keyword.text;

function chip(
  keyword: KeywordDto,
  selectedIds: Set<string>,
  handlers: PanelHandlers,
): HTMLElement {
  const node = el("span", {
    className: `chip chip-${slug(keyword.category)}`,
    text: chipLabel(keyword),
    dataset: { keywordId: keyword.id, category: keyword.category },
    onClick: () => handlers.toggleSelect(keyword),
  });
  if (selectedIds.has(keyword.id)) node.classList.add("selected");
  return node;
}

// -- extraction panel --------------------------------------------------------

export function renderExtractionPanel(
  container: HTMLElement,
  board: BoardDto,
  handlers: PanelHandlers,
  notice: string | null,
): void {
  container.innerHTML = "";
  container.append(el("h2", { text: "Keyword Extraction" }));

  const input = el("input", { className: "upload-input" });
  input.type = "file";
  input.accept = "image/png,image/jpeg";
  input.addEventListener("change", () => {
    if (input.files && input.files[0]) handlers.upload(input.files[0]);
  });
  container.append(input);
  if (notice) container.append(el("p", { className: "notice", text: notice }));

  const selectedIds = new Set(board.selected_keywords.map((k) => k.id));
  for (const ref of [...board.references].reverse()) {
    const section = el("section", { className: "reference-keywords", dataset: { refId: ref.id } });
    const heading = el("h3", { text: `Reference ${ref.id.slice(0, 8)}` });
    if (ref.degraded) {
      heading.append(el("span", { className: "badge degraded", text: "degraded" }));
    }
    section.append(heading, el("img", { className: "thumb", src: `blob:${ref.blob_sha}` }));
    for (const category of CATEGORIES) {
      const keywords = ref.keywords.filter((k) => k.category === category);
      if (!keywords.length) continue;
      const group = el(
        "div",
        { className: `category-group category-${slug(category)}` },
        el("h4", { text: category }),
      );
      for (const keyword of keywords) group.append(chip(keyword, selectedIds, handlers));
      section.append(group);
    }
    container.append(section);
  }
}

// -- mood board ---------------------------------------------------------------

const DEFAULT_SLOT = 170;

export function renderMoodBoard(
  container: HTMLElement,
  board: BoardDto,
  api: BoardApi,
  handlers: PanelHandlers,
  drag: DragContext,
): void {
  container.innerHTML = "";
  container.append(el("h2", { text: "Mood Board" }));

  const canvas = el("div", { className: "board-canvas" });
  makeDropTarget(canvas, drag, handlers.dropSuggested);

  const selectedIds = new Set(board.selected_keywords.map((k) => k.id));
  board.references.forEach((ref, index) => {
    const [x, y] = ref.position ?? [20 + (index % 3) * DEFAULT_SLOT, 20 + Math.floor(index / 3) * DEFAULT_SLOT];
    const card = el("div", {
      className: "reference-card",
      dataset: { refId: ref.id },
      style: { left: `${x}px`, top: `${y}px` },
    });
    card.append(el("img", { src: api.blobUrl(ref.blob_sha) }));
    if (ref.degraded) card.append(el("span", { className: "badge degraded", text: "degraded" }));

    // Selected chips anchor to the image's right edge and move with the card.
    const stack = el("div", { className: "chip-stack" });
    for (const keyword of ref.keywords.filter((k) => selectedIds.has(k.id))) {
      stack.append(
        el("span", {
          className: `chip chip-${slug(keyword.category)} selected`,
          text: chipLabel(keyword),
          dataset: { keywordId: keyword.id },
        }),
      );
    }
    card.append(stack);
    makeCardMovable(card, (nx, ny) => handlers.moveReference(ref, nx, ny));
    canvas.append(card);
  });

  // Board-level keywords (manual and dropped-in suggestions) sit on the canvas.
  const freeSelected = board.selected_keywords.filter((k) => !k.source_image);
  if (freeSelected.length) {
    const tray = el("div", { className: "free-chips" });
    for (const keyword of freeSelected) {
      tray.append(
        el("span", {
          className: `chip chip-${slug(keyword.category)} selected`,
          text: chipLabel(keyword),
          dataset: { keywordId: keyword.id },
        }),
      );
    }
    canvas.append(tray);
  }
  container.append(canvas);

  const strip = el("div", { className: "suggestion-strip" });
  strip.append(
    el("button", {
      className: "suggest-button",
      text: "Suggest keywords",
      onClick: () => handlers.recommend(),
    }),
  );
  const suggestions = board.keywords.filter(
    (k) => k.source === "recommended" && !selectedIds.has(k.id),
  );
  for (const keyword of suggestions) {
    const node = el("span", {
      className: `chip chip-${slug(keyword.category)} suggested`,
      text: chipLabel(keyword),
      dataset: { keywordId: keyword.id },
    });
    makeChipDraggable(node, keyword, drag);
    strip.append(node);
  }
  container.append(strip);
}

// -- merge panel ----------------------------------------------------------------

export function renderMergePanel(
  container: HTMLElement,
  board: BoardDto,
  api: BoardApi,
  handlers: PanelHandlers,
  guidance: string | null,
  degraded: boolean,
): void {
  container.innerHTML = "";
  const heading = el("h2", { text: "Keyword Merge" });
  if (degraded) heading.append(el("span", { className: "badge degraded", text: "degraded" }));
  container.append(heading);

  container.append(
    el("button", {
      className: "merge-button",
      text: "Merge selected keywords",
      onClick: () => handlers.merge(),
    }),
  );
  if (guidance) container.append(el("p", { className: "merge-guidance", text: guidance }));

  for (const draft of board.drafts) {
    const card = el("div", { className: "draft-card", dataset: { draftId: draft.id } });
    card.append(el("p", { className: "caption", text: draft.caption }));
    const objects = el("ul", { className: "objects" });
    for (const object of draft.objects) {
      objects.append(el("li", { text: `${object.name}: ${object.detail}` }));
    }
    card.append(objects);
    if (draft.sketches.length) {
      card.append(
        el("img", { className: "sketch-main", src: api.blobUrl(draft.sketches[0]) }),
      );
      const thumbs = el("div", { className: "sketch-thumbs" });
      for (const sha of draft.sketches.slice(1)) {
        thumbs.append(el("img", { className: "sketch-thumb", src: api.blobUrl(sha) }));
      }
      card.append(thumbs);
    }
    card.append(
      el("button", {
        className: "more-sketches",
        text: "More Sketches",
        onClick: () => handlers.moreSketches(draft),
      }),
    );
    container.append(card);
  }
}
