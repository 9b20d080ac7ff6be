import math

import pytest
from hypothesis import given, strategies as st

from forumnet.ingest import ForumDataError
from forumnet.semantic import (
    lexicon_score,
    message_complexity,
    node_semantics,
    parse_lexicon,
    score_sentiment,
    tokenize,
    word_surprisal,
)
from helpers import msg

LEX = {"good": "positive", "great": "positive", "bad": "negative"}


def test_tokenize():
    assert tokenize("Hello, WORLD! a b2 x-y") == ["hello", "world", "b2"]
    assert tokenize(None) == []


def test_sentiment_passthrough():
    assert score_sentiment([msg("m", "a", sentiment=0.8, text="bad bad")], LEX)["m"] == 0.8


def test_no_hits_is_neutral():
    assert lexicon_score("nothing to see", LEX) == 0.5


def test_positive_hits():
    assert lexicon_score("good and great", LEX) == 1.0
    assert lexicon_score("good bad bad", LEX) == pytest.approx((1 + (1 - 2) / 3) / 2)


def test_no_sentiment_and_no_text_is_missing():
    assert score_sentiment([msg("m", "a")], LEX)["m"] is None


def test_lexicon_double_polarity_is_fatal():
    with pytest.raises(ForumDataError):
        parse_lexicon("word,polarity\ngood,positive\ngood,negative\n")
    assert parse_lexicon("word,polarity\nGood,positive\n") == {"good": "positive"}


def test_node_sentiment_and_emotionality():
    events = [msg("m1", "a", sentiment=0.4), msg("m2", "a", 1, sentiment=0.6), msg("m3", "b", 2, sentiment=0.3)]
    sem = node_semantics(events, score_sentiment(events))
    assert sem["a"]["sentiment"] == pytest.approx(0.5)
    assert sem["a"]["emotionality"] == pytest.approx(0.1)
    assert sem["b"]["emotionality"] == 0


def test_complexity_formula():
    events = [msg("m1", "a", text="alpha beta alpha"), msg("m2", "b", 1, text="gamma")]
    sem = node_semantics(events, score_sentiment(events))
    assert sem["b"]["complexity"] == pytest.approx(-math.log(1 / 4))
    assert sem["b"]["complexity"] == pytest.approx(1.3863, abs=1e-4)


def test_semantics_missing_without_scorable_messages():
    events = [msg("m1", "a")]
    sem = node_semantics(events, score_sentiment(events))
    assert all(v is None for v in sem.get("a", {"x": None}).values())


words = st.lists(st.sampled_from(["aa", "bb", "cc", "dd", "ee"]), min_size=1, max_size=8).map(" ".join)


@given(st.lists(words, min_size=1, max_size=6))
def test_complexity_invariant_under_corpus_duplication(texts):
    events = [msg(f"m{i}", f"u{i % 2}", i, text=t) for i, t in enumerate(texts)]
    doubled = events + [msg(f"d{i}", f"u{i % 2}", 100 + i, text=t) for i, t in enumerate(texts)]
    once, twice = word_surprisal(events), word_surprisal(doubled)
    assert once.keys() == twice.keys()
    assert all(once[w] == pytest.approx(twice[w]) for w in once)
    for t in texts:
        assert message_complexity(t, once) == pytest.approx(message_complexity(t, twice))


@given(st.lists(words, min_size=1, max_size=6))
def test_rare_words_are_more_complex(texts):
    events = [msg(f"m{i}", "u", i, text=t) for i, t in enumerate(texts)]
    counts = {}
    for t in texts:
        for w in tokenize(t):
            counts[w] = counts.get(w, 0) + 1
    s = word_surprisal(events)
    ones = [w for w, c in counts.items() if c == 1]
    twos = [w for w, c in counts.items() if c == 2]
    assert all(s[a] > s[b] for a in ones for b in twos)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8))
def test_emotionality_zero_iff_constant(values):
    events = [msg(f"m{i}", "a", i, sentiment=v) for i, v in enumerate(values)]
    sem = node_semantics(events, score_sentiment(events))["a"]
    assert sem["emotionality"] >= 0
    assert (sem["emotionality"] == 0) == (len(set(values)) == 1)
    assert 0 <= sem["sentiment"] <= 1
