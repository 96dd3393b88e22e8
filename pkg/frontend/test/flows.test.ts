import { beforeEach, describe, expect, it } from "vitest";

import { BoardApi } from "../src/api.js";
import { createApp } from "../src/app.js";
import { MockBackend, seededReference } from "./mock_backend.js";

const flush = async () => {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
};

const mouse = (type: string, init: MouseEventInit = {}) =>
  new MouseEvent(type, { bubbles: true, cancelable: true, button: 0, ...init });

function setup(backend = new MockBackend()) {
  const root = document.createElement("div");
  document.body.append(root);
  const api = new BoardApi("http://api.test", backend.fetch);
  return { root, api, backend };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("three-panel flow", () => {
  it("renders extracted chips grouped by category", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);

    const panel = root.querySelector(".extraction-panel")!;
    const groups = panel.querySelectorAll(".category-group");
    const headings = [...groups].map((g) => g.querySelector("h4")!.textContent);
    expect(headings).toEqual([
      "subject matter",
      "action & pose",
      "theme & mood",
      "arrangement",
    ]);
    expect(panel.querySelectorAll(".chip-subject-matter")).toHaveLength(2);
    expect(panel.querySelector(".chip-arrangement")!.textContent).toBe("arrangement");
    expect(root.querySelector(".board-panel .reference-card")).not.toBeNull();
    expect(root.querySelector(".merge-panel .merge-button")).not.toBeNull();
  });

  it("clicking a chip selects it through the API", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);

    const chip = root.querySelector<HTMLElement>(".extraction-panel .chip")!;
    const keywordId = chip.dataset.keywordId!;
    chip.click();
    await flush();

    const call = backend.calls.find((c) => c.path.endsWith("keywords:select"));
    expect(call).toBeDefined();
    expect((call!.body as any).keyword_ids).toEqual([keywordId]);
    const rerendered = root.querySelector(`[data-keyword-id="${keywordId}"]`)!;
    expect(rerendered.classList.contains("selected")).toBe(true);
  });
});

describe("suggestion strip", () => {
  it("suggest button fills the strip", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);

    root.querySelector<HTMLElement>(".suggest-button")!.click();
    await flush();

    const chips = root.querySelectorAll(".suggestion-strip .chip");
    expect(chips.length).toBe(2);
  });

  it("dragging a suggested chip onto the board fires keywords:select", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    root.querySelector<HTMLElement>(".suggest-button")!.click();
    await flush();

    const suggested = root.querySelector<HTMLElement>(".suggestion-strip .chip")!;
    const suggestedId = suggested.dataset.keywordId!;
    const canvas = root.querySelector<HTMLElement>(".board-canvas")!;

    suggested.dispatchEvent(mouse("mousedown"));
    canvas.dispatchEvent(mouse("mouseup"));
    await flush();

    const selects = backend.calls.filter((c) => c.path.endsWith("keywords:select"));
    expect(selects).toHaveLength(1);
    expect((selects[0].body as any).keyword_ids).toEqual([suggestedId]);
    expect(backend.board.selected_keywords.map((k) => k.id)).toContain(suggestedId);
  });

  it("a drag released outside the board selects nothing", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    root.querySelector<HTMLElement>(".suggest-button")!.click();
    await flush();

    const suggested = root.querySelector<HTMLElement>(".suggestion-strip .chip")!;
    suggested.dispatchEvent(mouse("mousedown"));
    document.body.dispatchEvent(mouse("mouseup"));
    await flush();

    expect(backend.calls.filter((c) => c.path.endsWith("keywords:select"))).toHaveLength(0);
  });
});

describe("merge panel", () => {
  async function selectSubject(root: HTMLElement) {
    const chip = root.querySelector<HTMLElement>(".chip-subject-matter")!;
    chip.click();
    await flush();
  }

  it("merge renders three description+sketch cards", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    await selectSubject(root);

    root.querySelector<HTMLElement>(".merge-button")!.click();
    await flush();

    const cards = root.querySelectorAll(".merge-panel .draft-card");
    expect(cards).toHaveLength(3);
    for (const card of cards) {
      expect(card.querySelector(".caption")!.textContent).toMatch(/Draft caption/);
      expect(card.querySelector("img.sketch-main")).not.toBeNull();
      expect(card.querySelectorAll(".objects li").length).toBeGreaterThan(0);
    }
  });

  it("More Sketches appends five thumbnails to the card", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    await selectSubject(root);
    root.querySelector<HTMLElement>(".merge-button")!.click();
    await flush();

    root.querySelector<HTMLElement>(".draft-card .more-sketches")!.click();
    await flush();

    const firstCard = root.querySelector(".draft-card")!;
    expect(firstCard.querySelectorAll(".sketch-thumb")).toHaveLength(5);
    const sketchCall = backend.calls.find((c) => /drafts\/.+\/sketches$/.test(c.path));
    expect(sketchCall).toBeDefined();
  });

  it("renders inline guidance on a 422", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);

    root.querySelector<HTMLElement>(".merge-button")!.click();
    await flush();

    const guidance = root.querySelector(".merge-guidance");
    expect(guidance).not.toBeNull();
    expect(guidance!.textContent).toMatch(/subject-matter/);
    expect(root.querySelectorAll(".draft-card")).toHaveLength(0);
  });
});

describe("mood board", () => {
  it("selected chips live inside the reference card and move with it", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    const chip = root.querySelector<HTMLElement>(".extraction-panel .chip")!;
    chip.click();
    await flush();

    const card = root.querySelector<HTMLElement>(".reference-card")!;
    const stack = card.querySelector(".chip-stack")!;
    expect(stack.querySelectorAll(".chip")).toHaveLength(1);
    expect(stack.parentElement).toBe(card);

    card.dispatchEvent(mouse("mousedown", { clientX: 10, clientY: 10 }));
    document.dispatchEvent(mouse("mousemove", { clientX: 60, clientY: 40 }));
    document.dispatchEvent(mouse("mouseup", { clientX: 60, clientY: 40 }));
    await flush();

    const positionCall = backend.calls.find((c) => c.method === "PUT");
    expect(positionCall).toBeDefined();
    expect(backend.board.references[0].position).toEqual([70, 50]);
    const moved = root.querySelector<HTMLElement>(".reference-card")!;
    expect(moved.style.left).toBe("70px");
    expect(moved.style.top).toBe("50px");
  });

  it("degraded extraction shows a badge", async () => {
    const reference = { ...seededReference(), degraded: true };
    const { root, api, backend } = setup(new MockBackend([reference]));
    await createApp(root, api, backend.board.id);

    expect(root.querySelector(".extraction-panel .badge.degraded")).not.toBeNull();
    expect(root.querySelector(".reference-card .badge.degraded")).not.toBeNull();
  });
});

describe("state discipline", () => {
  it("reload reconstructs the identical board from the API", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    root.querySelector<HTMLElement>(".chip-subject-matter")!.click();
    await flush();
    root.querySelector<HTMLElement>(".merge-button")!.click();
    await flush();
    const firstRender = root.innerHTML;

    const freshRoot = document.createElement("div");
    document.body.append(freshRoot);
    await createApp(freshRoot, new BoardApi("http://api.test", backend.fetch), backend.board.id);
    expect(freshRoot.innerHTML).toBe(firstRender);
  });

  it("talks only to the /v1 API", async () => {
    const { root, api, backend } = setup();
    await createApp(root, api, backend.board.id);
    root.querySelector<HTMLElement>(".suggest-button")!.click();
    await flush();
    root.querySelector<HTMLElement>(".chip-subject-matter")!.click();
    await flush();
    root.querySelector<HTMLElement>(".merge-button")!.click();
    await flush();

    expect(backend.calls.length).toBeGreaterThan(3);
    for (const call of backend.calls) {
      expect(call.path.startsWith("/v1/")).toBe(true);
    }
  });
});
