"""The full board-service loop, in process: create a board, upload a
reference, select keywords, ask for recommendations, merge, request more
sketches, and export the action log.

Run:  python demos/05_service_roundtrip.py
"""
import json
import tempfile

import numpy as np
from fastapi.testclient import TestClient
from PIL import Image, ImageDraw

from recomb.providers import stub_bundle
from recomb.service import BoardStore, ServiceConfig, create_app


def reference_png() -> bytes:
    import io

    rng = np.random.default_rng(3)
    img = Image.new("RGB", (512, 512), (252, 248, 240))
    draw = ImageDraw.Draw(img)
    for _ in range(5):
        x, y = rng.integers(0, 380, size=2)
        w, h = rng.integers(60, 130, size=2)
        draw.rectangle([int(x), int(y), int(x + w), int(y + h)],
                       fill=tuple(int(c) for c in rng.integers(60, 220, size=3)))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


with tempfile.TemporaryDirectory() as tmp:
    app = create_app(BoardStore(tmp), stub_bundle(seed=2), ServiceConfig())
    with TestClient(app) as client:
        board_id = client.post("/v1/boards").json()["id"]
        print("board:", board_id)

        ref = client.post(
            f"/v1/boards/{board_id}/references",
            files={"image": ("ref.png", reference_png(), "image/png")},
        ).json()["reference"]
        print("\nextracted keywords:")
        for kw in ref["keywords"]:
            print(f"  [{kw['category']}] {kw['text'] or kw['arrangement_id']}")

        ids = [k["id"] for k in ref["keywords"]
               if k["category"] in ("subject matter", "arrangement")]
        client.post(f"/v1/boards/{board_id}/keywords:select", json={"keyword_ids": ids})

        suggested = client.post(
            f"/v1/boards/{board_id}/recommendations", json={"scope": "selected"}
        ).json()["keywords"]
        print("\nsuggested keywords:", ", ".join(k["text"] for k in suggested))

        drafts = client.post(f"/v1/boards/{board_id}/merges", json={}).json()["drafts"]
        print("\nmerge produced:")
        for d in drafts:
            print(f"  {d['caption']}  ({len(d['sketches'])} sketch, "
                  f"layout of {len(d['layout'])} boxes)")

        more = client.post(
            f"/v1/boards/{board_id}/drafts/{drafts[0]['id']}/sketches"
        ).json()["sketches"]
        print(f"\nmore sketches appended: {len(more)}")

        print("\naction log:")
        for line in client.get(f"/v1/boards/{board_id}/log").text.splitlines():
            record = json.loads(line)
            print(f"  {record['ts_ms']}  {record['kind']}")
