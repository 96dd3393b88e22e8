// Thin client for the /v1 board API. Every mutation the UI performs goes
// through this class; there is no other network access in the client.

import { BoardDto, DraftDto, KeywordDto, ProblemDto, ReferenceDto } from "./types.js";

export class ApiError extends Error {
  readonly problem: ProblemDto;

  constructor(problem: ProblemDto) {
    super(problem.detail || problem.title);
    this.problem = problem;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface SelectPayload {
  keyword_ids?: string[];
  manual?: { category: string; text: string }[];
  deselect_ids?: string[];
}

export class BoardApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body instanceof FormData) {
      init.body = body;
    } else if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let problem: ProblemDto;
      try {
        problem = (await response.json()) as ProblemDto;
      } catch {
        problem = {
          type: "about:blank",
          title: response.statusText,
          detail: `HTTP ${response.status}`,
          status: response.status,
        };
      }
      throw new ApiError(problem);
    }
    return (await response.json()) as T;
  }

  createBoard(): Promise<BoardDto> {
    return this.request("POST", "/v1/boards");
  }

  getBoard(boardId: string): Promise<BoardDto> {
    return this.request("GET", `/v1/boards/${boardId}`);
  }

  addReference(boardId: string, file: Blob, name = "reference.png") {
    const form = new FormData();
    form.append("image", file, name);
    return this.request<{ reference: ReferenceDto; degraded: boolean }>(
      "POST",
      `/v1/boards/${boardId}/references`,
      form,
    );
  }

  selectKeywords(boardId: string, payload: SelectPayload) {
    return this.request<{ selected_keywords: KeywordDto[] }>(
      "POST",
      `/v1/boards/${boardId}/keywords:select`,
      payload,
    );
  }

  recommend(boardId: string, scope: "auto" | "selected" | "board" = "auto") {
    return this.request<{ keywords: KeywordDto[] }>(
      "POST",
      `/v1/boards/${boardId}/recommendations`,
      { scope },
    );
  }

  merge(boardId: string) {
    return this.request<{ drafts: DraftDto[]; degraded: boolean; dropped: number }>(
      "POST",
      `/v1/boards/${boardId}/merges`,
      {},
    );
  }

  moreSketches(boardId: string, draftId: string) {
    return this.request<{ draft: DraftDto; sketches: string[] }>(
      "POST",
      `/v1/boards/${boardId}/drafts/${draftId}/sketches`,
    );
  }

  setPosition(boardId: string, refId: string, x: number, y: number) {
    return this.request<BoardDto>(
      "PUT",
      `/v1/boards/${boardId}/references/${refId}/position`,
      { x, y },
    );
  }

  blobUrl(sha: string): string {
    return `${this.baseUrl}/v1/blobs/${sha}`;
  }
}
