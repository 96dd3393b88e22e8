"""A tour of the bounding-box toolkit: IoU, the arrangement-similarity metric,
and the layout variator that powers "more sketches".

Run:  python demos/01_geometry_and_variator.py
"""
from recomb import Arrangement, BBox, VariatorParams, iou, layout_similarity, vary_arrangement

# Two boxes extracted from a reference image of a pair of pandas.
pandas = Arrangement(
    id="pandas",
    source_image="panda-photo",
    boxes=(BBox(0.059, 0.335, 0.414, 0.441), BBox(0.516, 0.338, 0.434, 0.432)),
)

print("IoU of the two panda boxes:", round(iou(*pandas.boxes), 4))
print("Self-similarity of the layout (should be 2 per box):",
      layout_similarity(list(pandas.boxes), list(pandas.boxes)))

# The variator jitters every box component by up to ±50 px (on a 512 px
# canvas), samples as many boxes as we have objects to draw, and ranks the
# candidates by similarity to the original arrangement.
params = VariatorParams(jitter_px=50, n_candidates=100, top_k=5, rng_seed=7)
ranked = vary_arrangement(pandas, n_objects=2, params=params)

print("\nTop-5 candidate layouts (most similar first):")
for rank, candidate in enumerate(ranked):
    score = layout_similarity(candidate, list(pandas.boxes))
    row = "  ".join(
        f"({b.x:.3f},{b.y:.3f},{b.w:.3f},{b.h:.3f})" for b in candidate
    )
    print(f"  rank {rank}  similarity {score:.3f}  {row}")

# With more objects than reference boxes the variator samples with
# replacement and re-jitters repeats, so no two boxes coincide.
crowded = vary_arrangement(pandas, n_objects=4, params=params)
print("\nA 4-object candidate drawn from the 2-box arrangement:")
for b in crowded[0]:
    print(f"  ({b.x:.3f}, {b.y:.3f}, {b.w:.3f}, {b.h:.3f})")
