// In-memory stand-in for the board service, implementing just enough of the
// /v1 contract for the UI flows. Records every request for assertions.

import { BoardDto, DraftDto, KeywordDto, ReferenceDto } from "../src/types.js";

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

let counter = 0;
const nextId = (prefix: string) => `${prefix}-${++counter}`;

export function keyword(
  category: KeywordDto["category"],
  text: string,
  overrides: Partial<KeywordDto> = {},
): KeywordDto {
  return {
    id: nextId("kw"),
    category,
    text,
    source: "extracted",
    source_image: null,
    arrangement_id: null,
    ...overrides,
  };
}

export function seededReference(): ReferenceDto {
  const refId = nextId("ref");
  const withRef = (k: KeywordDto) => ({ ...k, source_image: refId });
  return {
    id: refId,
    blob_sha: "refblob",
    keywords: [
      withRef(keyword("subject matter", "whale")),
      withRef(keyword("subject matter", "Christmas tree")),
      withRef(keyword("action & pose", "swimming")),
      withRef(keyword("theme & mood", "adventure")),
      withRef(keyword("arrangement", "", { arrangement_id: "arr-1" })),
    ],
    arrangement: {
      id: "arr-1",
      source_image: refId,
      canvas_px: 512,
      boxes: [{ x: 0.1, y: 0.1, w: 0.3, h: 0.3 }],
    },
    position: null,
    degraded: false,
  };
}

function draft(index: number): DraftDto {
  return {
    id: nextId("draft"),
    caption: `Draft caption ${index}.`,
    objects: [
      { name: "whale", detail: "a whale mid-swim" },
      { name: "tree", detail: "a decorated tree" },
    ],
    layout: [
      { name: "whale", box: { x: 0.1, y: 0.2, w: 0.4, h: 0.4 } },
      { name: "tree", box: { x: 0.6, y: 0.1, w: 0.3, h: 0.5 } },
    ],
    sketches: [nextId("sketch")],
    layout_rank_used: 0,
    layout_candidates: [[{ x: 0.1, y: 0.2, w: 0.4, h: 0.4 }]],
    next_rank: 1,
    layout_source: "matched",
  };
}

export class MockBackend {
  board: BoardDto;
  calls: RecordedCall[] = [];
  failMergeWith422 = false;

  constructor(references: ReferenceDto[] = [seededReference()]) {
    this.board = {
      id: "board-1",
      references,
      keywords: [],
      selected_keywords: [],
      drafts: [],
      action_log: [],
    };
  }

  allKeywords(): KeywordDto[] {
    return [...this.board.references.flatMap((r) => r.keywords), ...this.board.keywords];
  }

  readonly fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    let body: unknown = undefined;
    if (typeof init?.body === "string") body = JSON.parse(init.body);
    this.calls.push({ method, path, body });
    const [status, payload] = this.route(method, path, body);
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };

  private route(method: string, path: string, body: any): [number, unknown] {
    const b = this.board;
    if (method === "POST" && path === "/v1/boards") return [201, b];
    if (method === "GET" && path === `/v1/boards/${b.id}`) return [200, b];

    if (method === "POST" && path === `/v1/boards/${b.id}/references`) {
      const ref = seededReference();
      b.references = [...b.references, ref];
      return [201, { reference: ref, degraded: ref.degraded }];
    }

    if (method === "POST" && path === `/v1/boards/${b.id}/keywords:select`) {
      const ids: string[] = body?.keyword_ids ?? [];
      const deselect: string[] = body?.deselect_ids ?? [];
      const picked = this.allKeywords().filter((k) => ids.includes(k.id));
      if (picked.length !== ids.length) {
        return [404, { type: "about:blank", title: "unknown keyword", detail: "no", status: 404 }];
      }
      const kept = b.selected_keywords.filter((k) => !deselect.includes(k.id));
      const merged = [...kept];
      for (const k of picked) {
        if (!merged.some((existing) => existing.id === k.id)) merged.push(k);
      }
      b.selected_keywords = merged;
      return [200, { selected_keywords: merged }];
    }

    if (method === "POST" && path === `/v1/boards/${b.id}/recommendations`) {
      const fresh = [
        { ...keyword("subject matter", "anchor"), source: "recommended" as const },
        { ...keyword("action & pose", "exploring sunken ship"), source: "recommended" as const },
      ];
      b.keywords = [...b.keywords, ...fresh];
      return [200, { keywords: fresh }];
    }

    if (method === "POST" && path === `/v1/boards/${b.id}/merges`) {
      const hasSubject = b.selected_keywords.some((k) => k.category === "subject matter");
      if (this.failMergeWith422 || !hasSubject) {
        return [
          422,
          {
            type: "about:blank",
            title: "no subject matter selected",
            detail: "select at least one subject-matter keyword",
            status: 422,
          },
        ];
      }
      const drafts = [draft(1), draft(2), draft(3)];
      b.drafts = [...b.drafts, ...drafts];
      return [201, { drafts, degraded: false, dropped: 0 }];
    }

    const sketchMatch = path.match(new RegExp(`^/v1/boards/${b.id}/drafts/([^/]+)/sketches$`));
    if (method === "POST" && sketchMatch) {
      const target = b.drafts.find((d) => d.id === sketchMatch[1]);
      if (!target) {
        return [404, { type: "about:blank", title: "unknown draft", detail: "no", status: 404 }];
      }
      const fresh = Array.from({ length: 5 }, () => nextId("sketch"));
      target.sketches = [...target.sketches, ...fresh];
      target.next_rank += 5;
      return [201, { draft: target, sketches: fresh }];
    }

    const posMatch = path.match(
      new RegExp(`^/v1/boards/${b.id}/references/([^/]+)/position$`),
    );
    if (method === "PUT" && posMatch) {
      const ref = b.references.find((r) => r.id === posMatch[1]);
      if (!ref) {
        return [404, { type: "about:blank", title: "unknown reference", detail: "no", status: 404 }];
      }
      ref.position = [body.x, body.y];
      return [200, b];
    }

    return [404, { type: "about:blank", title: "not found", detail: path, status: 404 }];
  }
}
