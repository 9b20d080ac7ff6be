"""Find spammers without labels, then check how moderators differ from
everyone else and whether an unlabelled ranking puts them near the top."""

from forumnet import (
    SynthConfig,
    analyze,
    detect_spammers,
    generate_forum,
    moderator_fingerprint,
    rank_moderator_candidates,
)

events, roster = generate_forum(SynthConfig(seed=7))
result = analyze(events)

verdicts = detect_spammers(result.graph, result.metrics, events)
flagged = {a for a, v in verdicts.items() if v.is_spammer}
truth = roster.spammers
print(f"flagged {len(flagged)} spammers, {len(flagged & truth)} of {len(truth)} labelled ones")

print("\nmoderators vs. others (Welch t-test):")
for row in moderator_fingerprint(result.metrics, roster.moderators):
    if row.tested:
        mark = "*" if row.significant else " "
        print(f"  {mark} {row.metric:<26} t={row.t:8.2f}  p={row.p:.2g}  {row.direction}")

ranking = rank_moderator_candidates(result.metrics).ranking
decile = {node for node, _ in ranking[: max(1, len(ranking) // 10)]}
hits = len(decile & roster.moderators)
print(f"\n{hits} of {len(roster.moderators)} moderators rank in the top decile of candidates")
