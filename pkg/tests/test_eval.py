import itertools
import json

import numpy as np
import pytest

from recomb.evalharness import (
    AnnotatedImage,
    BandingResult,
    DiversityResult,
    EvalReport,
    description_diversity,
    keyword_extraction_eval,
    load_manifest,
    match_pr,
    mean_embedding_similarity,
    recommendation_banding,
    render_report,
    report_metadata,
    write_report,
)
from recomb.pipeline import PipelineConfig
from recomb.prompts import KeywordSet
from recomb.providers import ProviderTimeout, StubEmbedder, stub_bundle
from tests.conftest import make_image


class RegistryEmbedder:
    """Orthogonal one-hot embeddings: equal texts match exactly, different
    texts are orthogonal. Registry is shared across calls."""

    provider_id = "registry-embedder"

    def __init__(self, dim: int = 64):
        self.dim = dim
        self.registry: dict[str, int] = {}

    def embed(self, texts):
        if not texts:
            raise ValueError("empty")
        vectors = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            idx = self.registry.setdefault(text, len(self.registry))
            assert idx < self.dim
            vectors[i, idx] = 1.0
        return vectors


def brute_force_max_matching(predicted, truth, embedder, threshold):
    """Counting oracle: enumerate every one-to-one assignment and count the
    best number of pairs at or above the threshold."""
    vectors = embedder.embed(list(predicted) + list(truth))
    pv, tv = vectors[: len(predicted)], vectors[len(predicted):]
    ok = {
        (i, j)
        for i in range(len(predicted))
        for j in range(len(truth))
        if float(np.dot(pv[i], tv[j])) >= threshold
    }
    best = 0
    for perm in itertools.permutations(range(len(truth)), min(len(predicted), len(truth))):
        matched = sum(1 for i, j in enumerate(perm) if (i, j) in ok)
        best = max(best, matched)
    return best


class TestMatchPR:
    def test_half_overlap(self):
        p, r = match_pr(["a", "b"], ["a", "c"], RegistryEmbedder())
        assert (p, r) == (0.5, 0.5)

    def test_identity(self):
        assert match_pr(["a", "b"], ["a", "b"], RegistryEmbedder()) == (1.0, 1.0)

    def test_three_predicted_six_truth_all_matched(self):
        embedder = RegistryEmbedder()
        predicted = ["a", "b", "c"]
        truth = ["a", "b", "c", "d", "e", "f"]
        p, r = match_pr(predicted, truth, embedder)
        assert (p, r) == (1.0, 0.5)
        # greedy equals the enumerated optimum here
        assert brute_force_max_matching(predicted, truth, embedder, 0.6) == 3

    def test_greedy_matches_enumeration_on_random_instances(self):
        embedder = StubEmbedder(seed=9)
        rng = np.random.default_rng(4)
        words = [f"word-{i}" for i in range(12)]
        for _ in range(25):
            predicted = [words[int(i)] for i in rng.choice(12, size=3, replace=False)]
            truth = [words[int(i)] for i in rng.choice(12, size=4, replace=False)]
            p, _ = match_pr(predicted, truth, embedder, threshold=0.3)
            greedy_matches = round(p * len(predicted))
            optimal = brute_force_max_matching(predicted, truth, embedder, 0.3)
            # exact-equality instances only: distinct words are near-orthogonal
            # under the hash embedder, so ties cannot flip the count
            assert greedy_matches == optimal

    def test_empty_conventions(self):
        embedder = RegistryEmbedder()
        assert match_pr([], [], embedder) == (1.0, 1.0)
        assert match_pr([], ["a"], embedder) == (1.0, 0.0)
        assert match_pr(["a"], [], embedder) == (0.0, 1.0)

    def test_swap_symmetry(self):
        embedder = RegistryEmbedder()
        predicted = ["a", "b", "x"]
        truth = ["a", "y"]
        p, r = match_pr(predicted, truth, embedder)
        r2, p2 = match_pr(truth, predicted, embedder)
        assert (p, r) == (p2, r2)

    def test_one_to_one_discipline(self):
        # two predicted equal texts cannot both consume the single truth entry
        p, r = match_pr(["a", "a"], ["a"], RegistryEmbedder())
        assert (p, r) == (0.5, 1.0)

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            match_pr(["a"], ["a"], RegistryEmbedder(), threshold=0.0)


class TestMeanEmbeddingSimilarity:
    def test_identical_sets(self):
        assert mean_embedding_similarity(["a", "b"], ["a", "b"], StubEmbedder()) == pytest.approx(1.0)

    def test_orthogonal_sets(self):
        assert mean_embedding_similarity(["a"], ["b"], RegistryEmbedder()) == 0.0

    def test_two_vector_case_matches_brute_force(self):
        embedder = StubEmbedder(seed=2)
        a = ["sea turtle", "coral"]
        b = ["anchor", "kelp", "reef"]
        got = mean_embedding_similarity(a, b, embedder)
        # ten-line independent oracle: raw dot products, no shared helper
        va = embedder.embed(a)
        vb = embedder.embed(b)
        ma = [sum(col) / len(a) for col in va.T]
        mb = [sum(col) / len(b) for col in vb.T]
        dot = sum(x * y for x, y in zip(ma, mb))
        na = sum(x * x for x in ma) ** 0.5
        nb = sum(y * y for y in mb) ** 0.5
        assert got == pytest.approx(dot / (na * nb), abs=1e-12)

    def test_empty_side_rejected(self):
        with pytest.raises(ValueError):
            mean_embedding_similarity([], ["a"], StubEmbedder())


def synth_manifest(n: int = 6) -> list[AnnotatedImage]:
    subjects = ["fox", "kite", "river", "lantern", "bridge", "meadow", "sailboat", "cabin"]
    actions = ["gliding", "flowing", "glowing", "drifting"]
    moods = ["serene", "playful", "nostalgic", "windswept"]
    records = []
    for i in range(n):
        records.append(
            AnnotatedImage(
                image_path=f"img{i}.png",
                keywords=KeywordSet(
                    subject_matter=tuple(subjects[(i + j) % len(subjects)] for j in range(3)),
                    action_pose=(actions[i % len(actions)],),
                    theme_mood=(moods[i % len(moods)], moods[(i + 1) % len(moods)]),
                ),
            )
        )
    return records


class TestRecommendationBanding:
    def test_identity_recommender_scores_one(self, bundle):
        result = recommendation_banding(
            synth_manifest(6), bundle, n_sets=5, seed=3, recommender=lambda ks: ks
        )
        assert result.sim_recommended == pytest.approx(1.0, abs=1e-9)
        assert result.n_completed == 5
        assert not result.aborted

    def test_stub_run_is_deterministic(self, bundle):
        a = recommendation_banding(synth_manifest(6), bundle, n_sets=4, seed=9)
        b = recommendation_banding(synth_manifest(6), stub_bundle(seed=7), n_sets=4, seed=9)
        assert a == b

    def test_provider_failure_aborts_with_partial(self, bundle):
        calls = {"n": 0}

        def flaky_recommender(ks):
            calls["n"] += 1
            if calls["n"] >= 3:
                raise ProviderTimeout("injected")
            return ks

        result = recommendation_banding(
            synth_manifest(6), bundle, n_sets=5, seed=3, recommender=flaky_recommender
        )
        assert result.aborted
        assert result.n_completed == 2
        assert result.sim_recommended == pytest.approx(1.0)

    def test_requires_enough_images(self, bundle):
        with pytest.raises(ValueError):
            recommendation_banding(synth_manifest(3), bundle, n_sets=5)


class ScriptedDiversityChat:
    """Returns scripted caption triples for recombine, fixed paraphrases."""

    provider_id = "scripted-diversity"

    def __init__(self, triples, paraphrase_suffix=" paraphrased"):
        self.triples = list(triples)
        self.calls = 0
        self.paraphrase_suffix = paraphrase_suffix

    def chat(self, request):
        if request.template_id == "recombine":
            captions = self.triples[self.calls % len(self.triples)]
            self.calls += 1
            return "\n".join(
                f"{i + 1}.\nCaption: {c}\nObjects: [(thing, a thing)]"
                for i, c in enumerate(captions)
            )
        if request.template_id == "paraphrase":
            return "\n".join(
                line + self.paraphrase_suffix for line in request.user_turn.split("\n")
            )
        raise AssertionError(f"unexpected template {request.template_id}")


class TestDescriptionDiversity:
    def test_identical_descriptions_have_zero_diversity(self, bundle):
        from dataclasses import replace

        chat = ScriptedDiversityChat([["same.", "same.", "same."]], paraphrase_suffix="")
        result = description_diversity(
            synth_manifest(6)[:4] * 2, replace(bundle, chat=chat), n_sets=2, seed=1
        )
        assert result.sim_generated == pytest.approx(1.0, abs=1e-9)
        assert result.div_generated == pytest.approx(0.0, abs=1e-9)

    def test_orthogonal_descriptions_have_unit_diversity(self, bundle):
        from dataclasses import replace

        chat = ScriptedDiversityChat(
            [[f"caption {i} {j}." for j in range(3)] for i in range(4)]
        )
        modified = replace(bundle, chat=chat, embedder=RegistryEmbedder(dim=128))
        result = description_diversity(synth_manifest(6), modified, n_sets=3, seed=2)
        assert result.sim_generated == pytest.approx(0.0, abs=1e-9)
        assert result.div_generated == pytest.approx(1.0, abs=1e-9)

    def test_hand_computed_oracle_exact(self, bundle):
        from dataclasses import replace

        triples = [
            ["a fox at dawn.", "a kite in wind.", "a river in fog."],
            ["a lantern lit.", "a bridge at dusk.", "a meadow in rain."],
        ]
        embedder = StubEmbedder(seed=5)
        chat = ScriptedDiversityChat(triples)
        modified = replace(bundle, chat=chat, embedder=embedder)
        result = description_diversity(synth_manifest(6), modified, n_sets=2, seed=0)

        def pairwise(texts):
            vecs = embedder.embed(texts)
            sims = []
            for i in range(len(texts)):
                for j in range(i + 1, len(texts)):
                    sims.append(float(np.dot(vecs[i], vecs[j])))
            return sum(sims) / len(sims)

        # the two scripted triples alternate; seed-0 order determines which
        # set index got which triple, but the mean over both is order-free
        expected_gen = (pairwise(triples[0]) + pairwise(triples[1])) / 2
        assert result.sim_generated == pytest.approx(expected_gen, abs=1e-9)
        assert result.div_generated == pytest.approx(1 - expected_gen, abs=1e-12)
        expected_para = (
            pairwise([triples[0][0]] + [triples[0][0] + " paraphrased"] * 2)
            + pairwise([triples[1][0]] + [triples[1][0] + " paraphrased"] * 2)
        ) / 2
        assert result.sim_paraphrase == pytest.approx(expected_para, abs=1e-9)

    def test_parse_failures_skip_sets(self, bundle):
        from dataclasses import replace

        class HalfBrokenChat:
            provider_id = "half-broken"

            def __init__(self, inner):
                self.inner = inner
                self.calls = 0

            def chat(self, request):
                if request.template_id == "recombine":
                    self.calls += 1
                    if self.calls % 2 == 0:
                        return "garbage with no blocks"
                return self.inner.chat(request)

        modified = replace(bundle, chat=HalfBrokenChat(bundle.chat))
        result = description_diversity(synth_manifest(8), modified, n_sets=6, seed=4)
        assert result.skipped == 3
        assert result.n_completed == 3


class TestKeywordExtractionEval:
    def test_runs_over_files_and_reports_ranges(self, bundle, tmp_path):
        manifest_entries = []
        for i, record in enumerate(synth_manifest(3)):
            path = tmp_path / record.image_path
            path.write_bytes(make_image(seed=i))
            manifest_entries.append(record)
        result = keyword_extraction_eval(
            manifest_entries, bundle, base_dir=tmp_path, config=PipelineConfig(seed=1)
        )
        for value in (
            result.subject_matter_precision,
            result.subject_matter_recall,
            result.action_pose_precision,
            result.action_pose_recall,
        ):
            assert 0.0 <= value <= 1.0
        assert -1.0 <= result.theme_mood_similarity <= 1.0
        assert result.n_images == 3


class TestReport:
    def test_diversity_identity_holds_in_report(self, bundle):
        result = description_diversity(synth_manifest(6), bundle, n_sets=3, seed=8)
        payload = result.to_dict()
        for group in ("random", "generated", "paraphrase"):
            sim = payload["similarity"][group]
            div = payload["diversity"][group]
            if sim is not None:
                assert div == 1.0 - sim  # exact, not approximate

    def test_report_bytes_reproducible(self, bundle, tmp_path):
        manifest = synth_manifest(6)

        def run():
            fresh = stub_bundle(seed=7)
            banding = recommendation_banding(manifest, fresh, n_sets=4, seed=5)
            diversity = description_diversity(manifest, fresh, n_sets=4, seed=5)
            return EvalReport(
                metadata=report_metadata(fresh, 5, 0.6, 4, len(manifest)),
                banding=banding,
                diversity=diversity,
            )

        first, second = render_report(run()), render_report(run())
        assert first == second
        write_report(run(), tmp_path / "report.json")
        assert (tmp_path / "report.json").read_text(encoding="utf-8") == first

    def test_similarities_within_bounds(self, bundle):
        banding = recommendation_banding(synth_manifest(6), bundle, n_sets=4, seed=2)
        for value in (banding.sim_irrelevant, banding.sim_recommended, banding.sim_synonym):
            assert value is not None and -1.0 <= value <= 1.0

    def test_load_manifest_roundtrip(self, tmp_path):
        path = tmp_path / "manifest.jsonl"
        lines = [
            json.dumps(
                {
                    "image_path": f"img{i}.png",
                    "subject_matter": ["fox"],
                    "action_pose": [],
                    "theme_mood": ["serene"],
                }
            )
            for i in range(3)
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        records = load_manifest(path)
        assert len(records) == 3
        assert records[0].keywords.subject_matter == ("fox",)

    def test_manifest_requires_keywords(self, tmp_path):
        path = tmp_path / "manifest.jsonl"
        path.write_text(json.dumps({"image_path": "x.png"}) + "\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_manifest(path)
