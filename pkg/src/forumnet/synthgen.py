"""Seeded synthetic forum corpora with planted moderators, spammers and hubs.

Messages are generated one at a time. Each author is drawn by posting rate.
Regular rates are lognormal around 1. Moderators, spammers and a handful of
"power users" post at fixed multiples of that. Spammers only open threads
and are never answered. Everyone else opens a thread or replies. A reply
target comes from one of four moves:

* reply-back: answer the latest reply the author received;
* thread reply: answer some message in a recently active thread;
* repeat: answer the latest message of someone already answered before;
* preferential attachment (also the fallback): pick an author with weight
  ``appeal * (replies received + attachment_constant) ** attachment`` and
  answer their latest message.

Appeal is 1 except for power users, whose large appeal makes them the
network's hubs. Moderators rarely open threads. They mostly answer whoever
last replied to them, otherwise a recent message, and they answer faster
(delays divided by ``moderator_delay_divisor``).

Randomness comes from numpy's PCG64 generator seeded with ``seed``; the same
configuration always yields the same corpus.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .ingest import MessageEvent, Roster, parse_timestamp

DAY = 86400


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 1000
    n_messages: int = 20000
    n_moderators: int = 20
    n_spammers: int = 10
    n_power_users: int = 10
    # preferential weight: appeal * (replies received + attachment_constant) ** attachment
    attachment: float = 0.5
    attachment_constant: float = 1.0
    power_user_appeal: float = 200.0
    power_user_rate: float = 10.0
    moderator_reply_multiplier: float = 6.0
    moderator_delay_divisor: float = 4.0
    spammer_post_multiplier: float = 20.0
    span_days: float = 240.0
    seed: int = 0
    activity_spread: float = 0.5
    opener_prob: float = 0.2
    reply_back_prob: float = 0.1
    thread_reply_prob: float = 0.03
    repeat_prob: float = 0.6
    moderator_answer_prob: float = 0.95
    mean_delay_hours: float = 12.0
    recent_window: int = 100
    vocabulary: int = 3000
    start: str = "2016-01-01T00:00:00Z"

    def __post_init__(self):
        if min(self.n_users, self.n_messages) < 1:
            raise ValueError("n_users and n_messages must be positive")
        if min(self.n_moderators, self.n_spammers, self.n_power_users) < 0:
            raise ValueError("role counts must be non-negative")
        if self.n_moderators + self.n_spammers > self.n_users:
            raise ValueError("n_moderators + n_spammers exceeds n_users")
        if self.n_moderators + self.n_spammers + self.n_power_users > self.n_users:
            raise ValueError("n_moderators + n_spammers + n_power_users exceeds n_users")
        if self.n_messages < self.n_users:
            raise ValueError(
                f"n_messages ({self.n_messages}) < n_users ({self.n_users}): some user would never post"
            )
        if self.attachment < 0:
            raise ValueError("attachment strength must be >= 0")
        for name in ("moderator_reply_multiplier", "moderator_delay_divisor", "spammer_post_multiplier"):
            if getattr(self, name) <= 1:
                raise ValueError(f"{name} must be > 1")
        if self.power_user_appeal <= 0 or self.power_user_rate <= 0 or self.activity_spread < 0:
            raise ValueError("power-user appeal and rate must be positive, activity_spread >= 0")
        for name in ("opener_prob", "reply_back_prob", "thread_reply_prob", "repeat_prob", "moderator_answer_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.reply_back_prob + self.thread_reply_prob + self.repeat_prob > 1:
            raise ValueError("reply_back_prob + thread_reply_prob + repeat_prob must not exceed 1")
        if self.span_days <= 0 or self.mean_delay_hours <= 0:
            raise ValueError("span_days and mean_delay_hours must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_mapping(cls, values: dict) -> "SynthConfig":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown generator setting {key!r}")
            default = getattr(cls, key)
            kwargs[key] = type(default)(raw) if not isinstance(raw, type(default)) else raw
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "SynthConfig":
        """``key = value`` lines; ``#`` starts a comment."""
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
        return cls.from_mapping(values)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())


_SYLLABLES = ("ka", "lo", "mi", "ne", "ru", "ta", "ve", "zo", "pi", "se", "do", "fa", "gu", "hi", "jo", "be")


def _vocabulary(size: int) -> list[str]:
    words = []
    base = len(_SYLLABLES)
    for i in range(size):
        k, w = i, []
        for _ in range(3):
            w.append(_SYLLABLES[k % base])
            k //= base
        words.append("".join(w) + (str(k) if k else ""))
    return words


SPAM_WORDS = ("offer", "discount", "click", "free", "deal", "promo", "win", "buy")


def generate_forum(config: SynthConfig = SynthConfig()) -> tuple[list[MessageEvent], Roster]:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n_users, n_msgs = config.n_users, config.n_messages
    users = [f"u{i:04d}" for i in range(n_users)]
    order = rng.permutation(n_users)
    mods = set(order[: config.n_moderators].tolist())
    spams = set(order[config.n_moderators: config.n_moderators + config.n_spammers].tolist())
    nm = config.n_moderators + config.n_spammers
    power = set(order[nm: nm + config.n_power_users].tolist())
    role = ["regular"] * n_users
    for i in mods:
        role[i] = "moderator"
    for i in spams:
        role[i] = "spammer"

    # posting rates; regular users vary lognormally around 1
    rate = rng.lognormal(0.0, config.activity_spread, size=n_users)
    rate /= rate.mean()
    appeal = np.ones(n_users)
    for i in power:
        rate[i] = config.power_user_rate
        appeal[i] = config.power_user_appeal
    for i in mods:
        rate[i] = config.moderator_reply_multiplier
    for i in spams:
        rate[i] = config.spammer_post_multiplier
    extra = rng.choice(n_users, size=n_msgs - n_users, p=rate / rate.sum())
    authors = np.concatenate([np.arange(n_users), extra])
    rng.shuffle(authors)

    vocab = _vocabulary(config.vocabulary)
    zipf = 1.0 / np.arange(1, len(vocab) + 1) ** 1.1
    zipf /= zipf.sum()
    user_mood = rng.uniform(0.3, 0.7, size=n_users)

    span = int(config.span_days * DAY)
    start = parse_timestamp(config.start)
    opener_times = np.sort(rng.uniform(0, span, size=n_msgs))
    mean_delay = config.mean_delay_hours * 3600

    # message state, indexed by generation order
    m_author: list[int] = []
    m_time: list[int] = []
    m_thread: list[int] = []
    m_parent: list[Optional[int]] = []
    thread_msgs: list[list[int]] = []
    latest_by: dict[int, int] = {}
    last_reply_to: dict[int, int] = {}
    received = np.zeros(n_users)
    # eligible reply targets: posted at least once, not a spammer
    eligible: list[int] = []
    is_eligible = np.zeros(n_users, dtype=bool)
    # preferential weight (received + constant) ** strength, zero until a user posts
    pa_weight = np.zeros(n_users)
    recent: list[int] = []
    partners: list[list[int]] = [[] for _ in range(n_users)]
    partner_set: list[set] = [set() for _ in range(n_users)]

    def pick_preferential(me: int) -> Optional[int]:
        if not eligible or (len(eligible) == 1 and eligible[0] == me):
            return None
        w = pa_weight.copy()
        w[me] = 0.0
        cum = np.cumsum(w)
        cand = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        return latest_by[min(cand, n_users - 1)]

    def pick_thread(me: int) -> Optional[int]:
        if not recent:
            return None
        m = recent[int(rng.integers(len(recent)))]
        msgs = [x for x in thread_msgs[m_thread[m]] if m_author[x] != me]
        if not msgs:
            return None
        return msgs[int(rng.integers(len(msgs)))]

    def pick_recent(me: int) -> Optional[int]:
        cands = [x for x in recent if m_author[x] != me and role[m_author[x]] != "moderator"]
        if not cands:
            cands = [x for x in recent if m_author[x] != me]
        if not cands:
            return None
        return cands[int(rng.integers(len(cands)))]

    for k in range(n_msgs):
        a = int(authors[k])
        target = None
        if role[a] == "spammer":
            target = None
        elif role[a] == "moderator":
            if rng.random() >= config.opener_prob / 4:
                if rng.random() < config.moderator_answer_prob and a in last_reply_to:
                    target = last_reply_to[a]
                else:
                    target = pick_recent(a)
        elif rng.random() >= config.opener_prob:
            u = rng.random()
            if u < config.reply_back_prob and a in last_reply_to:
                target = last_reply_to[a]
            elif u < config.reply_back_prob + config.thread_reply_prob:
                target = pick_thread(a)
            elif u < config.reply_back_prob + config.thread_reply_prob + config.repeat_prob and partners[a]:
                target = latest_by[partners[a][int(rng.integers(len(partners[a])))]]
            if target is None:
                target = pick_preferential(a)

        if target is None:
            t = int(opener_times[k])
            thread = len(thread_msgs)
            thread_msgs.append([])
        else:
            scale = mean_delay / (config.moderator_delay_divisor if role[a] == "moderator" else 1.0)
            t = min(m_time[target] + int(rng.exponential(scale)), span)
            thread = m_thread[target]
            tgt_author = m_author[target]
            if tgt_author not in partner_set[a]:
                partner_set[a].add(tgt_author)
                partners[a].append(tgt_author)
            received[tgt_author] += 1
            if is_eligible[tgt_author]:
                pa_weight[tgt_author] = appeal[tgt_author] * (received[tgt_author] + config.attachment_constant) ** config.attachment
            last_reply_to[tgt_author] = k
        m_author.append(a)
        m_time.append(t)
        m_thread.append(thread)
        m_parent.append(target)
        thread_msgs[thread].append(k)
        latest_by[a] = k
        if role[a] != "spammer":
            if not is_eligible[a]:
                is_eligible[a] = True
                eligible.append(a)
                pa_weight[a] = appeal[a] * (received[a] + config.attachment_constant) ** config.attachment
            recent.append(k)
            if len(recent) > config.recent_window:
                recent.pop(0)

    events = []
    for k in range(n_msgs):
        a = m_author[k]
        if role[a] == "spammer":
            words = [SPAM_WORDS[int(i)] for i in rng.integers(len(SPAM_WORDS), size=8)]
            sentiment = float(rng.uniform(0.55, 0.75))
        else:
            n_words = int(rng.integers(5, 30))
            idx = rng.choice(len(vocab), size=n_words, p=zipf)
            if role[a] == "moderator":
                # institutional language: steadier tone, rarer vocabulary
                rare = rng.integers(len(vocab) // 2, len(vocab), size=n_words)
                idx = np.where(rng.random(n_words) < 0.3, rare, idx)
                sentiment = float(np.clip(rng.normal(0.6, 0.05), 0, 1))
            else:
                sentiment = float(np.clip(rng.normal(user_mood[a], 0.2), 0, 1))
            words = [vocab[int(i)] for i in idx]
        events.append(
            MessageEvent(
                message_id=f"m{k:06d}",
                thread_id=f"t{m_thread[k]:05d}",
                author_id=users[a],
                timestamp=start + m_time[k],
                parent_id=None if m_parent[k] is None else f"m{m_parent[k]:06d}",
                sentiment=round(sentiment, 4),
                text=" ".join(words),
            )
        )
    events.sort(key=lambda e: (e.timestamp, e.message_id))
    roster = Roster({users[i]: role[i] for i in range(n_users) if role[i] != "regular"})
    return events, roster
