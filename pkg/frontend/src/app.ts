// Application shell: three panels, all state derived from GET /v1/boards/{id}.
// Every user action is an API call followed by a refresh, so a reload (or a
// second client) reconstructs the identical board.

import { ApiError, BoardApi } from "./api.js";
import { el } from "./dom.js";
import { createDragContext } from "./dragdrop.js";
import { PanelHandlers, renderExtractionPanel, renderMergePanel, renderMoodBoard } from "./panels.js";
import { BoardDto, DraftDto, KeywordDto, ReferenceDto } from "./types.js";

export class App {
  private board: BoardDto | null = null;
  private extractionNotice: string | null = null;
  private mergeGuidance: string | null = null;
  private lastMergeDegraded = false;
  private readonly drag = createDragContext();
  private readonly panels: {
    extraction: HTMLElement;
    board: HTMLElement;
    merge: HTMLElement;
  };

  constructor(
    root: HTMLElement,
    private readonly api: BoardApi,
    private readonly boardId: string,
  ) {
    this.panels = {
      extraction: el("aside", { className: "panel extraction-panel" }),
      board: el("main", { className: "panel board-panel" }),
      merge: el("aside", { className: "panel merge-panel" }),
    };
    root.innerHTML = "";
    root.append(this.panels.extraction, this.panels.board, this.panels.merge);
  }

  async refresh(): Promise<void> {
    this.board = await this.api.getBoard(this.boardId);
    this.render();
  }

  private render(): void {
    if (!this.board) return;
    renderExtractionPanel(this.panels.extraction, this.board, this.handlers, this.extractionNotice);
    renderMoodBoard(this.panels.board, this.board, this.api, this.handlers, this.drag);
    renderMergePanel(
      this.panels.merge,
      this.board,
      this.api,
      this.handlers,
      this.mergeGuidance,
      this.lastMergeDegraded,
    );
  }

  private run(action: () => Promise<void>): void {
    action()
      .catch((error) => this.report(error))
      .then(() => this.refresh());
  }

  private report(error: unknown): void {
    if (error instanceof ApiError && error.problem.status === 422) {
      this.mergeGuidance = error.problem.detail;
    } else if (error instanceof ApiError) {
      this.extractionNotice = `${error.problem.title}: ${error.problem.detail}`;
    } else {
      this.extractionNotice = String(error);
    }
  }

  private readonly handlers: PanelHandlers = {
    upload: (file: File) =>
      this.run(async () => {
        this.extractionNotice = null;
        const result = await this.api.addReference(this.boardId, file);
        if (result.degraded) this.extractionNotice = "extraction ran degraded";
      }),

    toggleSelect: (keyword: KeywordDto) =>
      this.run(async () => {
        const selected = this.board?.selected_keywords.some((k) => k.id === keyword.id);
        await this.api.selectKeywords(
          this.boardId,
          selected ? { deselect_ids: [keyword.id] } : { keyword_ids: [keyword.id] },
        );
      }),

    dropSuggested: (keyword: KeywordDto) =>
      this.run(async () => {
        await this.api.selectKeywords(this.boardId, { keyword_ids: [keyword.id] });
      }),

    recommend: () =>
      this.run(async () => {
        await this.api.recommend(this.boardId);
      }),

    merge: () =>
      this.run(async () => {
        this.mergeGuidance = null;
        const result = await this.api.merge(this.boardId);
        this.lastMergeDegraded = result.degraded;
      }),

    moreSketches: (draft: DraftDto) =>
      this.run(async () => {
        await this.api.moreSketches(this.boardId, draft.id);
      }),

    moveReference: (ref: ReferenceDto, x: number, y: number) =>
      this.run(async () => {
        await this.api.setPosition(this.boardId, ref.id, x, y);
      }),
  };
}

export async function createApp(root: HTMLElement, api: BoardApi, boardId?: string): Promise<App> {
  const id = boardId ?? (await api.createBoard()).id;
  const app = new App(root, api, id);
  await app.refresh();
  return app;
}
