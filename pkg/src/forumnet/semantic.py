"""Sentiment, emotionality and vocabulary complexity per author."""

from __future__ import annotations

import csv
import io
import math
import re
import statistics
from collections import Counter, defaultdict
from typing import Mapping, Optional, Sequence

from .ingest import ForumDataError, MessageEvent

_SPLIT = re.compile(r"[^0-9a-z]+")
POLARITIES = ("positive", "negative")


def tokenize(text: Optional[str]) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop tokens shorter than 2."""
    if not text:
        return []
    return [t for t in _SPLIT.split(text.lower()) if len(t) >= 2]


def parse_lexicon(source) -> dict[str, str]:
    """Read a ``word,polarity`` table. A word with both polarities is an error."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    text = source if isinstance(source, str) else source.read()
    lexicon: dict[str, str] = {}
    for i, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not any(c.strip() for c in row):
            continue
        if i == 1 and [c.strip() for c in row] == ["word", "polarity"]:
            continue
        if len(row) != 2:
            raise ForumDataError(f"lexicon row {i}: expected 2 columns")
        word, pol = row[0].strip().lower(), row[1].strip().lower()
        if pol not in POLARITIES:
            raise ForumDataError(f"lexicon row {i}: polarity must be positive or negative, got {row[1]!r}")
        if lexicon.get(word, pol) != pol:
            raise ForumDataError(f"lexicon word {word!r} is both positive and negative")
        lexicon[word] = pol
    return lexicon


def lexicon_score(text: str, lexicon: Mapping[str, str]) -> float:
    pos = neg = 0
    for tok in tokenize(text):
        pol = lexicon.get(tok)
        if pol == "positive":
            pos += 1
        elif pol == "negative":
            neg += 1
    if pos + neg == 0:
        return 0.5
    return (1 + (pos - neg) / (pos + neg)) / 2


def score_sentiment(events: Sequence[MessageEvent], lexicon: Optional[Mapping[str, str]] = None) -> dict[str, Optional[float]]:
    """Sentiment per message id.

    A sentiment already on the event wins. Otherwise the text is scored with
    the lexicon (0.5 when no lexicon word occurs); no text means no score.
    """
    lexicon = lexicon or {}
    out = {}
    for ev in events:
        if ev.sentiment is not None:
            out[ev.message_id] = ev.sentiment
        elif ev.text:
            out[ev.message_id] = lexicon_score(ev.text, lexicon)
        else:
            out[ev.message_id] = None
    return out


def word_surprisal(events: Sequence[MessageEvent]) -> dict[str, float]:
    counts = Counter(tok for ev in events for tok in tokenize(ev.text))
    total = sum(counts.values())
    return {w: -math.log(c / total) for w, c in counts.items()}


def message_complexity(text: Optional[str], surprisal: Mapping[str, float]) -> Optional[float]:
    tokens = tokenize(text)
    if not tokens:
        return None
    return sum(surprisal[t] for t in tokens) / len(tokens)


def node_semantics(events: Sequence[MessageEvent], sentiment: Optional[Mapping[str, Optional[float]]] = None) -> dict[str, dict]:
    """Mean sentiment, emotionality (population std of sentiment) and mean
    message complexity per author.

    Complexity of a message is the mean surprisal ``-ln p(w)`` of its tokens,
    with ``p(w)`` the word's relative frequency in ``events``.
    """
    if sentiment is None:
        sentiment = score_sentiment(events)
    surprisal = word_surprisal(events)
    sents: dict[str, list[float]] = defaultdict(list)
    comps: dict[str, list[float]] = defaultdict(list)
    authors = set()
    for ev in events:
        authors.add(ev.author_id)
        s = sentiment.get(ev.message_id)
        if s is not None:
            sents[ev.author_id].append(s)
        c = message_complexity(ev.text, surprisal)
        if c is not None:
            comps[ev.author_id].append(c)
    out = {}
    for v in sorted(authors):
        row: dict[str, Optional[float]] = {"sentiment": None, "emotionality": None, "complexity": None}
        xs = sents[v]
        if xs:
            row["sentiment"] = statistics.fmean(xs)
            # exact arithmetic: identical sentiments give exactly 0
            row["emotionality"] = statistics.pstdev(xs)
        if comps[v]:
            row["complexity"] = sum(comps[v]) / len(comps[v])
        out[v] = row
    return out
