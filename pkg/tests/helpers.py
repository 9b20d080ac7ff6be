"""Small builders shared by the test modules."""

from __future__ import annotations

from forumnet.graph import ForumGraph
from forumnet.ingest import MessageEvent, parse_timestamp

T0 = parse_timestamp("2016-03-01T10:00:00Z")


def msg(mid, author, t=0, parent=None, thread=None, sentiment=None, text=None, spam=None) -> MessageEvent:
    return MessageEvent(
        message_id=mid,
        thread_id=thread or "t",
        author_id=author,
        timestamp=T0 + t,
        parent_id=parent,
        sentiment=sentiment,
        text=text,
        spam_label=spam,
    )


def graph_from_arcs(arcs, nodes=()) -> ForumGraph:
    """ForumGraph with unit-weight arcs ``u -> v``; ``nodes`` adds isolated ones."""
    arcs = [(str(u), str(v)) for u, v in arcs if u != v]
    names = sorted({x for a in arcs for x in a} | {str(v) for v in nodes})
    return ForumGraph(nodes=tuple(names), arcs={a: 1 for a in sorted(set(arcs))}, messages={})


def events_from_arcs(arcs, nodes=()) -> list[MessageEvent]:
    """One opener per node, then one reply per arc ``u -> v`` answering v's opener."""
    names = sorted({x for a in arcs for x in a} | set(nodes))
    events = [msg(f"o-{v}", v, t=i) for i, v in enumerate(names)]
    for k, (u, v) in enumerate(arcs):
        events.append(msg(f"r{k}", u, t=1000 + k, parent=f"o-{v}"))
    return events
