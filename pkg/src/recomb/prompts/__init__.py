"""Prompt kit: template assets, request builders, response parsers, crop planning."""
from .builders import (
    NoSubjectMatterError,
    build_extraction_request,
    build_layout_gen_request,
    build_layout_match_request,
    build_paraphrase_request,
    build_recombination_request,
    build_recommendation_request,
    format_box,
    format_component,
    format_names,
)
from .grid import GRID, CropPlan, plan_grid_crops
from .keywordset import KeywordSet
from .parsers import (
    LayoutParse,
    ParseError,
    RecombinationParse,
    parse_keyword_response,
    parse_layout_response,
    parse_recombination_response,
)
from .templates import (
    AUX_TEMPLATE_IDS,
    TEMPLATE_IDS,
    ChatMessage,
    ChatRequest,
    PromptTemplate,
    asset_text,
    load_template,
)

__all__ = [
    "AUX_TEMPLATE_IDS",
    "GRID",
    "TEMPLATE_IDS",
    "ChatMessage",
    "ChatRequest",
    "CropPlan",
    "KeywordSet",
    "LayoutParse",
    "NoSubjectMatterError",
    "ParseError",
    "PromptTemplate",
    "RecombinationParse",
    "asset_text",
    "build_extraction_request",
    "build_layout_gen_request",
    "build_layout_match_request",
    "build_paraphrase_request",
    "build_recombination_request",
    "build_recommendation_request",
    "format_box",
    "format_component",
    "format_names",
    "load_template",
    "parse_keyword_response",
    "parse_layout_response",
    "parse_recombination_response",
    "plan_grid_crops",
]
