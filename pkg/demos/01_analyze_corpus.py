"""Build the reply graph of a synthetic forum and print its whole-network
summary plus the most central authors."""

from forumnet import SynthConfig, analyze, generate_forum

events, roster = generate_forum(SynthConfig(seed=7))
result = analyze(events)
s = result.summary

print(f"{len(events)} messages, {s.n} authors, {s.arc_count} arcs")
print(f"average distance among reachable pairs: {s.adarp:.3f}")
print(f"diameter: {s.diameter}   clustering: {s.clustering:.3f}   average degree: {s.avg_degree:.3f}")

top = result.metrics.sort_values("betweenness", ascending=False).head(5)
print("\nhighest betweenness:")
print(top[["degree", "betweenness", "closeness", "contribution_index"]].round(3).to_string())
