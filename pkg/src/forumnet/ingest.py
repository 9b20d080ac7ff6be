"""Reading and validating forum message logs and role rosters.

Two input layouts are accepted for message logs: a comma-separated table
whose first row is the header, and line-delimited JSON records. Both use the
same field names (see ``MESSAGE_FIELDS``).
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Optional, Union

logger = logging.getLogger(__name__)

MESSAGE_FIELDS = (
    "message_id",
    "thread_id",
    "parent_id",
    "author_id",
    "timestamp",
    "sentiment",
    "spam_label",
    "text",
)
ROLES = ("moderator", "spammer", "regular")
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no"}


class ForumDataError(ValueError):
    """Unrecoverable problem with an input file (duplicate ids, bad roster)."""


@dataclass(frozen=True)
class MessageEvent:
    message_id: str
    thread_id: str
    author_id: str
    timestamp: int  # seconds since the Unix epoch, UTC
    parent_id: Optional[str] = None
    sentiment: Optional[float] = None
    text: Optional[str] = None
    spam_label: Optional[bool] = None

    @property
    def is_reply(self) -> bool:
        return self.parent_id is not None


@dataclass(frozen=True)
class Diagnostic:
    record: int  # 1-based record number in the input (header excluded)
    message_id: Optional[str]
    kind: str  # "rejected" or "repaired"
    detail: str

    def __str__(self):
        mid = self.message_id if self.message_id is not None else "?"
        return f"record {self.record} ({mid}): {self.kind}: {self.detail}"


@dataclass
class ParseResult:
    events: list[MessageEvent]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    n_records: int = 0

    @property
    def rejected(self) -> int:
        return sum(1 for d in self.diagnostics if d.kind == "rejected")


def parse_timestamp(value: str) -> int:
    dt = datetime.strptime(value, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(seconds: int) -> str:
    return datetime.fromtimestamp(seconds, tz=timezone.utc).strftime(TIMESTAMP_FORMAT)


def _opt_str(value) -> Optional[str]:
    if value is None:
        return None
    value = str(value)
    return value if value != "" else None


def _parse_sentiment(value) -> Optional[float]:
    if value is None or value == "":
        return None
    x = float(value)
    if not 0.0 <= x <= 1.0:  # also rejects nan
        raise ValueError(f"sentiment {value!r} outside [0, 1]")
    return x


def _parse_bool(value) -> Optional[bool]:
    if value is None or value == "":
        return None
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in _TRUE:
        return True
    if s in _FALSE:
        return False
    raise ValueError(f"spam_label {value!r} is not a boolean")


def _read_text(source: Union[bytes, str, IO]) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _iter_records(text: str, fmt: str) -> Iterable[dict]:
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text, newline=""))
        header = tuple(reader.fieldnames or ())
        if header != MESSAGE_FIELDS:
            raise ForumDataError(
                f"message log header {list(header)} does not match {list(MESSAGE_FIELDS)}"
            )
        yield from reader
    elif fmt == "jsonl":
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ForumDataError(f"line {lineno}: invalid JSON ({exc})") from exc
            if not isinstance(rec, dict):
                raise ForumDataError(f"line {lineno}: record is not an object")
            unknown = set(rec) - set(MESSAGE_FIELDS)
            if unknown:
                raise ForumDataError(f"line {lineno}: unknown fields {sorted(unknown)}")
            yield rec
    else:
        raise ValueError(f"unknown message log format {fmt!r} (expected 'csv' or 'jsonl')")


def parse_message_log(source, format: str = "csv") -> ParseResult:
    """Parse a message log into time-ordered events plus diagnostics.

    Records with a malformed timestamp or an out-of-range sentiment are
    rejected. Replies whose parent is unknown, or whose parent is later than
    the reply, are kept as thread openers. A repeated ``message_id`` raises
    :class:`ForumDataError`.
    """
    text = _read_text(source)
    diagnostics: list[Diagnostic] = []
    accepted: list[MessageEvent] = []
    seen: set[str] = set()
    n = 0
    for n, rec in enumerate(_iter_records(text, format), 1):
        mid = _opt_str(rec.get("message_id"))
        if mid is None:
            diagnostics.append(Diagnostic(n, None, "rejected", "missing message_id"))
            continue
        if mid in seen:
            raise ForumDataError(f"duplicate message_id {mid!r} (record {n})")
        seen.add(mid)
        author = _opt_str(rec.get("author_id"))
        thread = _opt_str(rec.get("thread_id"))
        if author is None or thread is None:
            diagnostics.append(Diagnostic(n, mid, "rejected", "missing author_id or thread_id"))
            continue
        raw_ts = _opt_str(rec.get("timestamp"))
        try:
            ts = parse_timestamp(raw_ts) if raw_ts is not None else None
        except ValueError:
            ts = None
        if ts is None:
            diagnostics.append(Diagnostic(n, mid, "rejected", f"bad timestamp {raw_ts!r}"))
            continue
        try:
            sentiment = _parse_sentiment(rec.get("sentiment"))
            spam = _parse_bool(rec.get("spam_label"))
        except ValueError as exc:
            diagnostics.append(Diagnostic(n, mid, "rejected", str(exc)))
            continue
        accepted.append(
            MessageEvent(
                message_id=mid,
                thread_id=thread,
                author_id=author,
                timestamp=ts,
                parent_id=_opt_str(rec.get("parent_id")),
                sentiment=sentiment,
                text=_opt_str(rec.get("text")),
                spam_label=spam,
            )
        )

    # parents are resolved against accepted records only
    times = {ev.message_id: ev.timestamp for ev in accepted}
    numbering = _record_numbers(n, diagnostics)
    events = []
    for i, ev in enumerate(accepted):
        pid = ev.parent_id
        if pid is not None:
            if pid not in times:
                diagnostics.append(
                    Diagnostic(numbering[i], ev.message_id, "repaired",
                               f"unknown parent {pid!r}; treated as thread opener")
                )
                ev = _demote(ev)
            elif times[pid] > ev.timestamp:
                diagnostics.append(
                    Diagnostic(numbering[i], ev.message_id, "repaired",
                               f"parent {pid!r} is later than the reply; treated as thread opener")
                )
                ev = _demote(ev)
        events.append(ev)
    events.sort(key=lambda e: (e.timestamp, e.message_id))
    diagnostics.sort(key=lambda d: d.record)
    for d in diagnostics:
        logger.debug("%s", d)
    return ParseResult(events=events, diagnostics=diagnostics, n_records=n)


def _record_numbers(n_records: int, diagnostics: list[Diagnostic]) -> list[int]:
    # map accepted-event position back to its input record number
    rejected = {d.record for d in diagnostics if d.kind == "rejected"}
    return [r for r in range(1, n_records + 1) if r not in rejected]


def _demote(ev: MessageEvent) -> MessageEvent:
    return MessageEvent(
        message_id=ev.message_id,
        thread_id=ev.thread_id,
        author_id=ev.author_id,
        timestamp=ev.timestamp,
        parent_id=None,
        sentiment=ev.sentiment,
        text=ev.text,
        spam_label=ev.spam_label,
    )


def _event_row(ev: MessageEvent) -> dict:
    return {
        "message_id": ev.message_id,
        "thread_id": ev.thread_id,
        "parent_id": ev.parent_id or "",
        "author_id": ev.author_id,
        "timestamp": format_timestamp(ev.timestamp),
        "sentiment": "" if ev.sentiment is None else repr(ev.sentiment),
        "spam_label": "" if ev.spam_label is None else ("true" if ev.spam_label else "false"),
        "text": ev.text or "",
    }


def write_message_log(events: Iterable[MessageEvent], dest: IO[str], format: str = "csv") -> None:
    """Serialize events in the same layout :func:`parse_message_log` reads."""
    if format == "csv":
        writer = csv.DictWriter(dest, fieldnames=MESSAGE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for ev in events:
            writer.writerow(_event_row(ev))
    elif format == "jsonl":
        for ev in events:
            dest.write(json.dumps(_event_row(ev), ensure_ascii=False) + "\n")
    else:
        raise ValueError(f"unknown message log format {format!r}")


@dataclass
class Roster:
    roles: dict[str, str] = field(default_factory=dict)

    def role(self, author_id: str) -> str:
        return self.roles.get(author_id, "regular")

    def with_role(self, role: str) -> set[str]:
        return {a for a, r in self.roles.items() if r == role}

    @property
    def moderators(self) -> set[str]:
        return self.with_role("moderator")

    @property
    def spammers(self) -> set[str]:
        return self.with_role("spammer")

    def without_node(self, events: Iterable[MessageEvent]) -> set[str]:
        """Roster authors that never posted, and therefore have no graph node."""
        posted = {ev.author_id for ev in events}
        return {a for a in self.roles if a not in posted}


def parse_roster(source) -> Roster:
    text = _read_text(source)
    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if any(c.strip() for c in r)]
    if rows and [c.strip() for c in rows[0]] == ["author_id", "role"]:
        rows = rows[1:]
    roles: dict[str, str] = {}
    for i, row in enumerate(rows, 1):
        if len(row) != 2:
            raise ForumDataError(f"roster row {i}: expected 2 columns, got {len(row)}")
        author, role = row[0].strip(), row[1].strip().lower()
        if role not in ROLES:
            raise ForumDataError(
                f"roster row {i}: unknown role {row[1]!r}; allowed roles are {', '.join(ROLES)}"
            )
        if author in roles and roles[author] != role:
            raise ForumDataError(
                f"roster author {author!r} listed as both {roles[author]!r} and {role!r}"
            )
        roles[author] = role
    return Roster(roles)


def write_roster(roster: Roster, dest: IO[str]) -> None:
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(["author_id", "role"])
    for author in sorted(roster.roles):
        writer.writerow([author, roster.roles[author]])
