"""Reference-recombination engine: extract categorized keywords from reference
images, recommend related keywords, and merge selections into sketch drafts.
"""
from .layout import (
    NoArrangementError,
    ScoredSegment,
    VariatorParams,
    centroid_distance,
    iou,
    layout_similarity,
    select_arrangement,
    vary_arrangement,
)
from .model import (
    ActionKind,
    ActionRecord,
    Arrangement,
    BBox,
    Board,
    DraftObject,
    Keyword,
    KeywordCategory,
    KeywordSource,
    Recombination,
    Reference,
    frac_to_px,
    px_to_frac,
    validate_bbox,
)
from .pipeline import (
    ExtractionResult,
    InvalidStateError,
    MemoryBlobs,
    MergeResult,
    PipelineConfig,
    PipelineError,
    extract_keywords_pipeline,
    keywords_to_set,
    merge_pipeline,
    more_sketches,
    recommend_pipeline,
)
from .prompts import KeywordSet

__version__ = "0.1.0"

__all__ = [
    "ActionKind",
    "ActionRecord",
    "Arrangement",
    "BBox",
    "Board",
    "DraftObject",
    "ExtractionResult",
    "InvalidStateError",
    "Keyword",
    "KeywordCategory",
    "KeywordSet",
    "KeywordSource",
    "MemoryBlobs",
    "MergeResult",
    "NoArrangementError",
    "PipelineConfig",
    "PipelineError",
    "Recombination",
    "Reference",
    "ScoredSegment",
    "VariatorParams",
    "centroid_distance",
    "extract_keywords_pipeline",
    "frac_to_px",
    "iou",
    "keywords_to_set",
    "layout_similarity",
    "merge_pipeline",
    "more_sketches",
    "px_to_frac",
    "recommend_pipeline",
    "select_arrangement",
    "validate_bbox",
    "vary_arrangement",
]
