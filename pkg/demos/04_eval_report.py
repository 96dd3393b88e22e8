"""The evaluation harness on a small synthetic manifest: keyword-extraction
precision/recall, recommendation similarity banding, and description
diversity, all offline and reproducible.

Run:  python demos/04_eval_report.py
"""
import json
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from recomb.evalharness import (
    EvalReport,
    description_diversity,
    keyword_extraction_eval,
    load_manifest,
    recommendation_banding,
    render_report,
    report_metadata,
)
from recomb.providers import stub_bundle

SUBJECTS = ["fox", "kite", "river", "lantern", "bridge", "meadow", "sailboat"]


def build_manifest(root: Path, n: int = 6) -> Path:
    lines = []
    for i in range(n):
        rng = np.random.default_rng(i)
        img = Image.new("RGB", (256, 256), (248, 244, 236))
        draw = ImageDraw.Draw(img)
        for _ in range(4):
            x, y = rng.integers(0, 180, size=2)
            s = int(rng.integers(30, 70))
            draw.rectangle([int(x), int(y), int(x + s), int(y + s)],
                           fill=tuple(int(c) for c in rng.integers(50, 200, size=3)))
        img.save(root / f"img{i}.png")
        lines.append(json.dumps({
            "image_path": f"img{i}.png",
            "subject_matter": SUBJECTS[i:i + 3],
            "action_pose": ["drifting"],
            "theme_mood": ["serene", "nostalgic"],
        }))
    path = root / "manifest.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    manifest_path = build_manifest(root)
    manifest = load_manifest(manifest_path)
    bundle = stub_bundle(seed=0)

    report = EvalReport(
        metadata=report_metadata(bundle, seed=0, threshold=0.6, n_sets=4,
                                 manifest_size=len(manifest)),
        keyword_extraction=keyword_extraction_eval(manifest, bundle, base_dir=root),
        banding=recommendation_banding(manifest, bundle, n_sets=4, seed=0),
        diversity=description_diversity(manifest, bundle, n_sets=4, seed=0),
    )
    print(render_report(report))
