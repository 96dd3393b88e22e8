"""Keyword extraction, end to end and fully offline.

The image is tiled into a 3x3 grid plus the full frame, every region is
captioned, the captions go through the extraction prompt, and the segmenter's
most prominent regions become the arrangement. The stub provider bundle makes
the whole run deterministic.

Run:  python demos/02_extract_keywords.py
"""
import io

import numpy as np
from PIL import Image, ImageDraw

from recomb import extract_keywords_pipeline
from recomb.providers import stub_bundle


def sample_reference() -> bytes:
    rng = np.random.default_rng(12)
    img = Image.new("RGB", (512, 512), (250, 245, 235))
    draw = ImageDraw.Draw(img)
    for _ in range(6):
        x, y = rng.integers(0, 400, size=2)
        w, h = rng.integers(50, 140, size=2)
        color = tuple(int(c) for c in rng.integers(40, 200, size=3))
        draw.ellipse([int(x), int(y), int(x + w), int(y + h)], fill=color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


bundle = stub_bundle(seed=0)
result = extract_keywords_pipeline(bundle, sample_reference())

print("Captions fed to the extraction prompt:")
for caption in result.captions:
    print("  -", caption)

print("\nExtracted keywords:")
print("  subject matter:", ", ".join(result.keywords.subject_matter))
print("  action & pose: ", ", ".join(result.keywords.action_pose))
print("  theme & mood:  ", ", ".join(result.keywords.theme_mood))

print("\nArrangement (most prominent segments first):")
for box in result.arrangement.boxes:
    print(f"  ({box.x:.3f}, {box.y:.3f}, {box.w:.3f}, {box.h:.3f})")
print("degraded:", result.degraded)
