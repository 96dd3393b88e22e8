"""Batch evaluation of the keyword pipelines over an annotated dataset.

The dataset is a JSON-lines manifest of {image_path, subject_matter[],
action_pose[], theme_mood[]}. Reports are reproducible byte-for-byte for a
fixed dataset, provider bundle, and seed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .pipeline import PipelineConfig, extract_keywords_pipeline, recommend_pipeline
from .prompts import (
    KeywordSet,
    ParseError,
    build_paraphrase_request,
    build_recombination_request,
    parse_recombination_response,
)
from .providers.base import Embedder, ProviderBundle, ProviderError

DEFAULT_MATCH_THRESHOLD = 0.60  # cosine acceptance for mechanized keyword matching


@dataclass(frozen=True)
class AnnotatedImage:
    image_path: str
    keywords: KeywordSet

    def __post_init__(self) -> None:
        if self.keywords.is_empty():
            raise ValueError(f"{self.image_path}: needs at least one ground-truth keyword")


def load_manifest(path: Path | str) -> list[AnnotatedImage]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                records.append(
                    AnnotatedImage(
                        image_path=d["image_path"],
                        keywords=KeywordSet(
                            subject_matter=tuple(d.get("subject_matter", ())),
                            action_pose=tuple(d.get("action_pose", ())),
                            theme_mood=tuple(d.get("theme_mood", ())),
                        ),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ValueError(f"manifest line {lineno}: {exc}") from exc
    if not records:
        raise ValueError("manifest is empty")
    return records


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    denom = float(np.linalg.norm(u) * np.linalg.norm(v))
    if denom == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / denom, -1.0, 1.0))


def match_pr(
    predicted: Sequence[str],
    truth: Sequence[str],
    embedder: Embedder,
    threshold: float = DEFAULT_MATCH_THRESHOLD,
) -> tuple[float, float]:
    """Greedy one-to-one matching by embedding cosine, best pairs first.

    A pair is accepted while its cosine is >= threshold and both sides are
    still unmatched; precision = matches/|predicted|, recall = matches/|truth|,
    with an empty denominator degenerating to 1.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    if not predicted and not truth:
        return (1.0, 1.0)
    if not predicted or not truth:
        return (1.0 if not predicted else 0.0, 1.0 if not truth else 0.0)
    vectors = embedder.embed(list(predicted) + list(truth))
    pv, tv = vectors[: len(predicted)], vectors[len(predicted):]
    pairs = sorted(
        ((i, j) for i in range(len(predicted)) for j in range(len(truth))),
        key=lambda ij: (-_cosine(pv[ij[0]], tv[ij[1]]), ij[0], ij[1]),
    )
    used_p: set[int] = set()
    used_t: set[int] = set()
    matches = 0
    for i, j in pairs:
        if i in used_p or j in used_t:
            continue
        if _cosine(pv[i], tv[j]) < threshold:
            break  # pairs are sorted; everything after is below threshold too
        used_p.add(i)
        used_t.add(j)
        matches += 1
    return (matches / len(predicted), matches / len(truth))


def mean_embedding_similarity(a: Sequence[str], b: Sequence[str], embedder: Embedder) -> float:
    """Cosine of the arithmetic mean embeddings of the two text sets."""
    if not a or not b:
        raise ValueError("both text sets must be non-empty")
    va = embedder.embed(list(a)).mean(axis=0)
    vb = embedder.embed(list(b)).mean(axis=0)
    return _cosine(va, vb)


def _mean_pairwise_similarity(texts: Sequence[str], embedder: Embedder) -> float:
    """Mean cosine over the unordered pairs of the given texts."""
    vectors = embedder.embed(list(texts))
    sims = [
        _cosine(vectors[i], vectors[j])
        for i in range(len(texts))
        for j in range(i + 1, len(texts))
    ]
    return float(np.mean(sims))


def _sample_keyword_set(
    rng: np.random.Generator,
    image: AnnotatedImage,
    size_range: tuple[int, int],
    require_subject: bool = False,
) -> KeywordSet:
    pool = [("subject_matter", t) for t in image.keywords.subject_matter]
    pool += [("action_pose", t) for t in image.keywords.action_pose]
    pool += [("theme_mood", t) for t in image.keywords.theme_mood]
    k = int(rng.integers(size_range[0], size_range[1] + 1))
    k = max(1, min(k, len(pool)))
    idx = list(rng.choice(len(pool), size=k, replace=False))
    if require_subject and image.keywords.subject_matter:
        if not any(pool[int(i)][0] == "subject_matter" for i in idx):
            subject_positions = [
                p for p, (cat, _) in enumerate(pool) if cat == "subject_matter"
            ]
            idx[0] = subject_positions[int(rng.integers(len(subject_positions)))]
    picked: dict[str, list[str]] = {"subject_matter": [], "action_pose": [], "theme_mood": []}
    for i in idx:
        cat, text = pool[int(i)]
        picked[cat].append(text)
    return KeywordSet(
        subject_matter=tuple(picked["subject_matter"]),
        action_pose=tuple(picked["action_pose"]),
        theme_mood=tuple(picked["theme_mood"]),
    )


# ---------------------------------------------------------------------------
# keyword extraction accuracy


@dataclass(frozen=True)
class KeywordEvalResult:
    subject_matter_precision: float
    subject_matter_recall: float
    action_pose_precision: float
    action_pose_recall: float
    theme_mood_similarity: float
    n_images: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_matter": {
                "precision": self.subject_matter_precision,
                "recall": self.subject_matter_recall,
            },
            "action_pose": {
                "precision": self.action_pose_precision,
                "recall": self.action_pose_recall,
            },
            "theme_mood_similarity": self.theme_mood_similarity,
            "n_images": self.n_images,
        }


def keyword_extraction_eval(
    manifest: Sequence[AnnotatedImage],
    bundle: ProviderBundle,
    threshold: float = DEFAULT_MATCH_THRESHOLD,
    config: PipelineConfig = PipelineConfig(),
    base_dir: Path | str = ".",
) -> KeywordEvalResult:
    """Run extraction over every manifest image and score it against the tags.

    Subject matter and action & pose score via threshold matching; theme & mood
    via mean-embedding cosine (0 when exactly one side is empty).
    """
    sm_p, sm_r, ap_p, ap_r, tm_sims = [], [], [], [], []
    for image in manifest:
        data = (Path(base_dir) / image.image_path).read_bytes()
        predicted = extract_keywords_pipeline(bundle, data, config).keywords
        p, r = match_pr(predicted.subject_matter, image.keywords.subject_matter,
                        bundle.embedder, threshold)
        sm_p.append(p)
        sm_r.append(r)
        p, r = match_pr(predicted.action_pose, image.keywords.action_pose,
                        bundle.embedder, threshold)
        ap_p.append(p)
        ap_r.append(r)
        if predicted.theme_mood and image.keywords.theme_mood:
            tm_sims.append(
                mean_embedding_similarity(predicted.theme_mood, image.keywords.theme_mood,
                                          bundle.embedder)
            )
        elif predicted.theme_mood or image.keywords.theme_mood:
            tm_sims.append(0.0)
    return KeywordEvalResult(
        subject_matter_precision=float(np.mean(sm_p)),
        subject_matter_recall=float(np.mean(sm_r)),
        action_pose_precision=float(np.mean(ap_p)),
        action_pose_recall=float(np.mean(ap_r)),
        theme_mood_similarity=float(np.mean(tm_sims)) if tm_sims else 0.0,
        n_images=len(manifest),
    )


# ---------------------------------------------------------------------------
# recommendation banding


@dataclass(frozen=True)
class BandingResult:
    sim_irrelevant: float | None
    sim_recommended: float | None
    sim_synonym: float | None
    n_completed: int
    aborted: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "sim_irrelevant": self.sim_irrelevant,
            "sim_recommended": self.sim_recommended,
            "sim_synonym": self.sim_synonym,
            "n_completed": self.n_completed,
            "aborted": self.aborted,
        }


def recommendation_banding(
    manifest: Sequence[AnnotatedImage],
    bundle: ProviderBundle,
    n_sets: int = 100,
    seed: int = 0,
    size_range: tuple[int, int] = (3, 10),
    config: PipelineConfig = PipelineConfig(),
    recommender: Callable[[KeywordSet], KeywordSet] | None = None,
) -> BandingResult:
    """Compare recommended keywords against irrelevant and synonym control groups.

    Per sampled keyword set: the recommended group comes from the recommendation
    pipeline (or the injected ``recommender``); the irrelevant group samples
    keywords from other images; the synonym group paraphrases the originals
    through the chat provider. Each group scores by mean-embedding similarity
    to the originals; means are over completed sets. Provider failures abort
    with a partial report.
    """
    if len(manifest) < n_sets:
        raise ValueError(f"need at least {n_sets} manifest images, got {len(manifest)}")
    if recommender is None:
        recommender = lambda ks: recommend_pipeline(bundle, ks, config)  # noqa: E731
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(manifest))[:n_sets]
    irr, rec, syn = [], [], []
    aborted = False
    for idx in order:
        image = manifest[int(idx)]
        originals = _sample_keyword_set(rng, image, size_range)
        original_texts = list(originals.all_texts())
        other_pool = [
            t
            for j, other in enumerate(manifest)
            if j != int(idx)
            for t in other.keywords.all_texts()
        ]
        irrelevant = [
            other_pool[int(i)]
            for i in rng.choice(len(other_pool), size=len(original_texts), replace=True)
        ]
        try:
            recommended = list(recommender(originals).all_texts())
            response = bundle.chat.chat(build_paraphrase_request(original_texts))
            synonyms = [s.strip() for s in response.split("\n") if s.strip()]
        except ProviderError:
            aborted = True
            break
        if not recommended or not synonyms:
            continue  # nothing to compare for this set
        irr.append(mean_embedding_similarity(irrelevant, original_texts, bundle.embedder))
        rec.append(mean_embedding_similarity(recommended, original_texts, bundle.embedder))
        syn.append(mean_embedding_similarity(synonyms, original_texts, bundle.embedder))
    return BandingResult(
        sim_irrelevant=float(np.mean(irr)) if irr else None,
        sim_recommended=float(np.mean(rec)) if rec else None,
        sim_synonym=float(np.mean(syn)) if syn else None,
        n_completed=len(rec),
        aborted=aborted,
    )


# ---------------------------------------------------------------------------
# description diversity


@dataclass(frozen=True)
class DiversityResult:
    sim_random: float | None
    sim_generated: float | None
    sim_paraphrase: float | None
    n_completed: int
    skipped: int = 0

    @property
    def div_random(self) -> float | None:
        return None if self.sim_random is None else 1.0 - self.sim_random

    @property
    def div_generated(self) -> float | None:
        return None if self.sim_generated is None else 1.0 - self.sim_generated

    @property
    def div_paraphrase(self) -> float | None:
        return None if self.sim_paraphrase is None else 1.0 - self.sim_paraphrase

    def to_dict(self) -> dict[str, Any]:
        return {
            "similarity": {
                "random": self.sim_random,
                "generated": self.sim_generated,
                "paraphrase": self.sim_paraphrase,
            },
            "diversity": {
                "random": self.div_random,
                "generated": self.div_generated,
                "paraphrase": self.div_paraphrase,
            },
            "n_completed": self.n_completed,
            "skipped": self.skipped,
        }


def description_diversity(
    manifest: Sequence[AnnotatedImage],
    bundle: ProviderBundle,
    n_sets: int = 100,
    seed: int = 0,
    size_range: tuple[int, int] = (3, 10),
    config: PipelineConfig = PipelineConfig(),
) -> DiversityResult:
    """Diversity (1 - mean pairwise similarity) of generated description triples,
    against a cross-set random control and a paraphrase control.

    Sets whose generation or parsing fails are skipped and counted.
    """
    if len(manifest) < n_sets:
        raise ValueError(f"need at least {n_sets} manifest images, got {len(manifest)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(manifest))[:n_sets]

    generated: list[list[str]] = []
    skipped = 0
    for idx in order:
        image = manifest[int(idx)]
        selected = _sample_keyword_set(rng, image, size_range, require_subject=True)
        if not selected.subject_matter:
            skipped += 1
            continue
        try:
            request = build_recombination_request(
                selected, temperature=config.temperature_high, model=config.chat_model
            )
            parse = parse_recombination_response(bundle.chat.chat(request))
        except (ParseError, ProviderError, ValueError):
            skipped += 1
            continue
        captions = [d.caption for d in parse.drafts[:3]]
        if len(captions) < 3:
            skipped += 1
            continue
        generated.append(captions)

    sims_gen, sims_rand, sims_para = [], [], []
    for i, captions in enumerate(generated):
        sims_gen.append(_mean_pairwise_similarity(captions, bundle.embedder))
        pool = [c for j, other in enumerate(generated) if j != i for c in other]
        if pool:
            random_group = [
                pool[int(k)]
                for k in rng.choice(len(pool), size=3, replace=len(pool) < 3)
            ]
            sims_rand.append(_mean_pairwise_similarity(random_group, bundle.embedder))
        try:
            response = bundle.chat.chat(build_paraphrase_request([captions[0], captions[0]]))
            paraphrases = [s.strip() for s in response.split("\n") if s.strip()][:2]
        except ProviderError:
            paraphrases = []
        if len(paraphrases) == 2:
            sims_para.append(
                _mean_pairwise_similarity([captions[0], *paraphrases], bundle.embedder)
            )
    return DiversityResult(
        sim_random=float(np.mean(sims_rand)) if sims_rand else None,
        sim_generated=float(np.mean(sims_gen)) if sims_gen else None,
        sim_paraphrase=float(np.mean(sims_para)) if sims_para else None,
        n_completed=len(generated),
        skipped=skipped,
    )


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class EvalReport:
    metadata: dict[str, Any]
    keyword_extraction: KeywordEvalResult | None = None
    banding: BandingResult | None = None
    diversity: DiversityResult | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "metadata": self.metadata,
            "keyword_extraction": None
            if self.keyword_extraction is None
            else self.keyword_extraction.to_dict(),
            "banding": None if self.banding is None else self.banding.to_dict(),
            "diversity": None if self.diversity is None else self.diversity.to_dict(),
        }


def report_metadata(
    bundle: ProviderBundle, seed: int, threshold: float, n_sets: int | None, manifest_size: int
) -> dict[str, Any]:
    return {
        "providers": bundle.provider_ids(),
        "seed": seed,
        "match_threshold": threshold,
        "n_sets": n_sets,
        "manifest_size": manifest_size,
    }


def render_report(report: EvalReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def write_report(report: EvalReport, path: Path | str) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")
