import random

import numpy as np
import pytest

from epipulse.embed import BuiltinHashEmbedder, cosine, embed_texts
from epipulse.filtering import (
    DEFAULT_BUILTIN_THRESHOLD,
    FilterTag,
    default_threshold,
    filter_corpus,
    keyword_frequency,
    tag_post,
)
from epipulse.ontology import EventType

from helpers import make_clean


def test_identity_seed_scores_one():
    v = np.array([0.6, 0.8])
    seeds = {e: np.stack([v if e is EventType.SPREAD else np.array([1.0, 0.0])]) for e in EventType}
    tag = tag_post("p", seeds, v)
    assert tag.best_event is EventType.SPREAD
    assert tag.score == pytest.approx(1.0)


def test_orthogonal_ties_break_to_first_event():
    seeds = {e: np.stack([np.array([0.0, 1.0])]) for e in EventType}
    tag = tag_post("p", seeds, np.array([1.0, 0.0]))
    assert tag.best_event is EventType.INFECT
    assert tag.score == pytest.approx(0.0)


def test_argmax_matches_bruteforce():
    rng = np.random.default_rng(5)
    for _ in range(25):
        seeds = {
            e: rng.normal(size=(rng.integers(1, 5), 6)) for e in EventType
        }
        post_vec = rng.normal(size=6)
        tag = tag_post("p", seeds, post_vec)
        flat = [
            (cosine(post_vec, vec), e.order, e)
            for e in EventType
            for vec in seeds[e]
        ]
        best = max(flat, key=lambda x: (x[0], -x[1]))
        assert tag.score == pytest.approx(best[0])
        # tie-break: lowest event order among the max scores
        top = max(s for s, _, _ in flat)
        winners = [e for s, _, e in flat if s == pytest.approx(top)]
        assert tag.best_event.order == min(w.order for w in winners)


def test_empty_seed_set_rejected():
    seeds = {e: np.zeros((1, 4)) for e in EventType}
    seeds[EventType.CURE] = np.zeros((0, 4))
    with pytest.raises(ValueError, match="cure"):
        tag_post("p", seeds, np.zeros(4))


def test_dimension_mismatch_propagates():
    seeds = {e: np.zeros((1, 4)) for e in EventType}
    with pytest.raises(ValueError, match="mismatch"):
        tag_post("p", seeds, np.zeros(3))


# --- filter_corpus ---------------------------------------------------------------

def corpus_of_seeds(default_spec):
    posts = []
    for e in EventType:
        text = default_spec.seeds_for(e)[0]
        posts.append(make_clean(text, pid=f"seed-{e.value}"))
    return posts


def gibberish(n, seed=0):
    rng = random.Random(seed)
    alphabet = "qwxzjkvbypfgh"
    out = []
    for i in range(n):
        words = [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(4, 9)))
            for _ in range(rng.randint(3, 8))
        ]
        out.append(make_clean(" ".join(words), pid=f"noise-{i}"))
    return out


def test_vacuous_threshold_retains_everything(default_spec):
    emb = BuiltinHashEmbedder()
    posts = corpus_of_seeds(default_spec) + gibberish(5)
    retained, rejected = filter_corpus(posts, default_spec, emb, threshold=-1.0)
    assert rejected == 0
    assert [p.id for p, _ in retained] == [p.id for p in posts]


def test_seed_texts_self_retained(default_spec):
    emb = BuiltinHashEmbedder()
    posts = corpus_of_seeds(default_spec)
    retained, rejected = filter_corpus(posts, default_spec, emb, threshold=0.999)
    assert rejected == 0
    for post, tag in retained:
        assert tag.score >= 0.999
        assert tag.best_event.value == post.id.removeprefix("seed-")


def test_synthetic_mixture_exact_retention(default_spec):
    emb = BuiltinHashEmbedder()
    signal = corpus_of_seeds(default_spec)
    noise = gibberish(93, seed=11)
    posts = signal + noise
    retained, rejected = filter_corpus(
        posts, default_spec, emb, threshold=DEFAULT_BUILTIN_THRESHOLD
    )
    assert {p.id for p, _ in retained} == {p.id for p in signal}
    assert rejected == 93

    # exhaustive pairwise oracle over the whole corpus
    seed_texts = [s for e in EventType for s in default_spec.seeds_for(e)]
    seed_vecs = embed_texts(emb, seed_texts)
    for post in posts:
        best = max(cosine(emb.embed_one(post.text), sv) for sv in seed_vecs)
        assert (best >= DEFAULT_BUILTIN_THRESHOLD) == (post.id.startswith("seed-"))


def test_threshold_monotonicity(default_spec):
    emb = BuiltinHashEmbedder()
    posts = corpus_of_seeds(default_spec) + gibberish(20, seed=3)
    previous = None
    for threshold in (-1.0, 0.0, 0.2, 0.5, 1.0):
        retained, _ = filter_corpus(posts, default_spec, emb, threshold)
        ids = {p.id for p, _ in retained}
        if previous is not None:
            assert ids <= previous
        previous = ids


def test_dropped_posts_excluded(default_spec):
    emb = BuiltinHashEmbedder()
    kept = make_clean("fever is a key symptom", pid="ok")
    dropped = make_clean("la fiebre sube", pid="no", lang="es")
    retained, rejected = filter_corpus([kept, dropped], default_spec, emb, threshold=-1.0)
    assert [p.id for p, _ in retained] == ["ok"]
    assert rejected == 0


def test_bad_threshold_rejected(default_spec):
    with pytest.raises(ValueError, match="threshold"):
        filter_corpus([], default_spec, BuiltinHashEmbedder(), threshold=1.5)


def test_default_threshold_per_kind():
    emb = BuiltinHashEmbedder()
    assert default_threshold(emb) == DEFAULT_BUILTIN_THRESHOLD

    class FakeRemote:
        kind = "remote"

    assert default_threshold(FakeRemote()) == 0.9


# --- keyword frequency -------------------------------------------------------------

def test_keyword_frequency_hand_count(default_spec):
    posts = [
        make_clean("no cure yet they say", pid="a"),
        make_clean("nothing to see", pid="b"),
        make_clean("just words", pid="c"),
    ]
    report = keyword_frequency(posts, default_spec)
    assert report.total_posts == 3
    assert report.counts[EventType.CURE] == 1
    for e in EventType:
        if e is not EventType.CURE:
            assert report.counts[e] == 0


def test_keyword_frequency_empty():
    from epipulse.ontology import default_ontology_path, load_ontology

    spec = load_ontology(default_ontology_path())
    report = keyword_frequency([], spec)
    assert report.total_posts == 0
    assert all(v == 0 for v in report.counts.values())


def test_keyword_frequency_post_level_dedup(default_spec):
    posts = [make_clean("cure recovery cure", pid="a")]
    report = keyword_frequency(posts, default_spec)
    assert report.counts[EventType.CURE] == 1


def test_counts_bounded_by_total(default_spec):
    posts = [
        make_clean("cure the fever spread now", pid="a"),
        make_clean("vaccine protects against the pandemic", pid="b"),
    ]
    report = keyword_frequency(posts, default_spec)
    assert all(v <= report.total_posts for v in report.counts.values())


def test_filter_tag_record():
    tag = FilterTag("p", EventType.DEATH, 0.5)
    assert tag.to_record() == {"event": "death", "score": 0.5}
