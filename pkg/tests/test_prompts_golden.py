"""Golden tests: template assets are the canonical prompt texts; builders must
embed them byte-identically, and every few-shot assistant text must parse into
its frozen typed value (see tests/golden/*.json).
"""
import json
from pathlib import Path

import pytest

from recomb.model import BBox
from recomb.prompts import (
    TEMPLATE_IDS,
    KeywordSet,
    asset_text,
    build_extraction_request,
    build_layout_gen_request,
    build_layout_match_request,
    build_recombination_request,
    build_recommendation_request,
    load_template,
    parse_keyword_response,
    parse_layout_response,
    parse_recombination_response,
)

GOLDEN_DIR = Path(__file__).parent / "golden"

BUILDERS = {
    "extract": lambda: build_extraction_request(["a placeholder caption"]),
    "recommend": lambda: build_recommendation_request(KeywordSet(subject_matter=("fox",))),
    "recombine": lambda: build_recombination_request(KeywordSet(subject_matter=("fox",))),
    "match_layout": lambda: build_layout_match_request(
        "a fox", ["fox"], [BBox(0.1, 0.1, 0.5, 0.5)]
    ),
    "gen_layout": lambda: build_layout_gen_request("a fox", ["fox"]),
}


def load_golden(template_id: str) -> dict:
    return json.loads((GOLDEN_DIR / f"{template_id}.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("template_id", TEMPLATE_IDS)
def test_template_render_is_byte_identical_to_asset(template_id):
    assert load_template(template_id).render() == asset_text(template_id)


@pytest.mark.parametrize("template_id", TEMPLATE_IDS)
def test_builders_embed_template_turns_verbatim(template_id):
    tpl = load_template(template_id)
    request = BUILDERS[template_id]()
    messages = request.messages
    assert messages[0].role == "system"
    assert messages[0].text == tpl.system
    shots = messages[1:-1]
    assert len(shots) == 2 * len(tpl.shots)
    for i, (user, assistant) in enumerate(tpl.shots):
        assert shots[2 * i].role == "user" and shots[2 * i].text == user
        assert shots[2 * i + 1].role == "assistant" and shots[2 * i + 1].text == assistant
    assert messages[-1].role == "user"


def test_template_spot_checks():
    # guard against transcription drift in load-bearing spots
    extract = load_template("extract")
    assert extract.system.startswith(
        "You will be provided with multiple sentences to describe an illustration."
    )
    assert "Eliminate the changed forms of the same word" in extract.system
    gen = load_template("gen_layout")
    assert "The images are of size 512x512." in gen.system
    assert "[('panda', [0.059, 0.335, 0.414, 0.441]), ('panda', [0.516, 0.338, 0.434, 0.432])]" \
        == gen.shots[5][1]
    match = load_template("match_layout")
    assert "The bounding boxes are represented as a proportion." in match.system
    recombine = load_template("recombine")
    assert '"Caption" and "Objects"' in recombine.system


def _golden_cases():
    cases = []
    for path in sorted(GOLDEN_DIR.glob("*.json")):
        spec = json.loads(path.read_text(encoding="utf-8"))
        for case in spec["cases"]:
            cases.append((spec["template_id"], spec["parser"], case))
    return cases


ALL_CASES = _golden_cases()


def test_corpus_has_at_least_twenty_cases():
    assert len(ALL_CASES) >= 20


@pytest.mark.parametrize(
    "template_id,parser,case",
    ALL_CASES,
    ids=[f"{t}-{c['shot']}" for t, _, c in ALL_CASES],
)
def test_every_fewshot_assistant_text_parses_to_frozen_value(template_id, parser, case):
    assistant = load_template(template_id).shots[case["shot"]][1]
    if parser == "keywords":
        ks = parse_keyword_response(assistant)
        assert list(ks.subject_matter) == case["subject_matter"]
        assert list(ks.action_pose) == case["action_pose"]
        assert list(ks.theme_mood) == case["theme_mood"]
    elif parser == "recombination":
        result = parse_recombination_response(assistant)
        assert not result.degraded
        assert len(result.drafts) == len(case["drafts"])
        for draft, expected in zip(result.drafts, case["drafts"]):
            assert draft.caption == expected["caption"]
            assert [[o.name, o.detail] for o in draft.objects] == expected["objects"]
            assert draft.layout is None
    elif parser == "layout":
        result = parse_layout_response(assistant)
        assert result.clamped == case["clamped"]
        assert len(result.entries) == len(case["layout"])
        for (name, box), expected in zip(result.entries, case["layout"]):
            assert name == expected["name"]
            ex, ey, ew, eh = expected["box"]
            assert box.x == pytest.approx(ex, abs=1e-9)
            assert box.y == pytest.approx(ey, abs=1e-9)
            assert box.w == pytest.approx(ew, abs=1e-9)
            assert box.h == pytest.approx(eh, abs=1e-9)
    else:
        pytest.fail(f"unknown parser kind {parser!r}")
