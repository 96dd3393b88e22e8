"""Merging selected keywords into three recombination drafts, each with a
caption, an object list, a resolved layout, and a line-sketch image, then
asking for five more sketches of the first draft.

Sketches land in demos/out/.

Run:  python demos/03_merge_to_sketches.py
"""
from pathlib import Path

from recomb import (
    Arrangement,
    BBox,
    KeywordSet,
    MemoryBlobs,
    PipelineConfig,
    merge_pipeline,
    more_sketches,
)
from recomb.providers import stub_bundle

selected = KeywordSet(
    subject_matter=("whale", "Santa Claus", "Christmas tree"),
    action_pose=("swimming",),
    theme_mood=("adventure", "underwater"),
)

# The arrangement keyword the user clicked on one of their references.
arrangement = Arrangement(
    id="ref-arrangement",
    source_image="ref-1",
    boxes=(
        BBox(0.05, 0.1, 0.35, 0.5),
        BBox(0.5, 0.05, 0.4, 0.35),
        BBox(0.45, 0.55, 0.45, 0.4),
    ),
)

bundle = stub_bundle(seed=4)
sink = MemoryBlobs()
config = PipelineConfig(seed=4)
result = merge_pipeline(bundle, selected, arrangement, sink, config)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

for i, draft in enumerate(result.drafts, start=1):
    print(f"draft {i}: {draft.caption}")
    for obj in draft.objects:
        print(f"    {obj.name}: {obj.detail}")
    print(f"    layout source: {draft.layout_source}; "
          f"{len(draft.layout_candidates)} ranked layouts stored")
    path = out / f"draft{i}_sketch0.png"
    path.write_bytes(sink[draft.sketches[0]])
    print(f"    wrote {path}")

print("\nMore sketches for draft 1 (ranks 1..5 of the stored layouts):")
updated, shas = more_sketches(bundle, result.drafts[0], sink, config)
for rank, sha in enumerate(shas, start=1):
    path = out / f"draft1_sketch{rank}.png"
    path.write_bytes(sink[sha])
    print(f"    rank {rank} -> {path}")
print("caption unchanged:", updated.caption == result.drafts[0].caption)
