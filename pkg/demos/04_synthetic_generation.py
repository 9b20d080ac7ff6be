"""Generate a small forum, write it out in the tool's input format and read
it back."""

import io

from forumnet import SynthConfig, generate_forum, parse_message_log
from forumnet.ingest import write_message_log

config = SynthConfig(n_users=200, n_messages=3000, n_moderators=5, n_spammers=3, n_power_users=3, seed=11)
events, roster = generate_forum(config)

buf = io.StringIO()
write_message_log(events, buf)
parsed = parse_message_log(buf.getvalue())

print(f"generated {len(events)} messages from {len({e.author_id for e in events})} authors")
print(f"round trip kept {len(parsed.events)} events, {len(parsed.diagnostics)} diagnostics")
print(f"moderators: {sorted(roster.moderators)}")
print(f"spammers:   {sorted(roster.spammers)}")
print("\nfirst lines of the log:")
print("".join(buf.getvalue().splitlines(keepends=True)[:4]), end="")
