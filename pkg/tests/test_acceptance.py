"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the measured
values, then asserts. Run alone with ``pytest tests/test_acceptance.py -v``
or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from forumnet.cli import main as cli_main  # noqa: E402
from forumnet.experiments import (  # noqa: E402
    RemovalStrategy,
    analyze,
    apply_removal,
    run_strategy,
    select_removal_set,
)
from forumnet.graph import betweenness, build_graph  # noqa: E402
from forumnet.interaction import activity_and_contribution, count_oscillations  # noqa: E402
from forumnet.reports import SUMMARY_HEADER, render_table, summary_rows  # noqa: E402
from forumnet.roles import detect_spammers, moderator_fingerprint, rank_moderator_candidates  # noqa: E402
from forumnet.stats import pearson, welch_t_test  # noqa: E402
from forumnet.structural import NetworkSummary, closeness, network_summary  # noqa: E402
from forumnet.synthgen import SynthConfig, generate_forum  # noqa: E402
from helpers import events_from_arcs, graph_from_arcs, msg  # noqa: E402
from oracles import oracle_metrics  # noqa: E402


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def synth():
    """Default generator corpus, its full analysis and the generation time."""
    t0 = time.perf_counter()
    events, roster = generate_forum(SynthConfig())
    gen_seconds = time.perf_counter() - t0
    return events, roster, analyze(events), gen_seconds


def test_criterion_1_metric_oracle(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    mismatches = []
    for seed in range(200):
        rng = random.Random(seed)
        n = rng.randint(1, 8)
        density = rng.uniform(0.05, 0.6)
        nodes = [f"v{i}" for i in range(n)]
        arcs = [(u, v) for u in nodes for v in nodes if u != v and rng.random() < density]
        g = graph_from_arcs(arcs, nodes)
        for direction in ("directed", "undirected"):
            ref = oracle_metrics(g.nodes, g.arcs, directed=direction == "directed")
            s = network_summary(g, direction)
            if (s.adarp is None) != (ref["adarp"] is None) or s.diameter != ref["diameter"]:
                mismatches.append((seed, direction, "adarp/diameter"))
                continue
            diffs = [abs(s.clustering - ref["clustering"])]
            if s.adarp is not None:
                diffs.append(abs(s.adarp - ref["adarp"]))
            c, b = closeness(g, direction), betweenness(g, direction)
            diffs += [abs(c[v] - ref["closeness"][v]) for v in g.nodes]
            diffs += [abs(b[v] - ref["betweenness"][v]) for v in g.nodes]
            worst = max(worst, max(diffs))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and worst <= 1e-9 and elapsed < 30
    verdict(1, ok, f"200 digraphs x 2 modes, max |diff| {worst:.1e}, mismatches {len(mismatches)}, {elapsed:.1f}s")


def test_criterion_2_statistics(verdict):
    w = welch_t_test([1, 2, 3], [4, 5, 6])
    r = [pearson([1, 2, 3], y).r for y in ([2, 4, 6], [3, 2, 1], [1, 2, 4])]
    ok = (
        abs(w.t - (-3.674)) <= 1e-3
        and abs(w.df - 4) <= 1e-3
        and abs(w.p - 0.021) <= 1e-3
        and abs(r[0] - 1) <= 1e-4
        and abs(r[1] + 1) <= 1e-4
        and abs(r[2] - 0.9820) <= 1e-4
    )
    verdict(2, ok, f"welch t={w.t:.4f} df={w.df:.4f} p={w.p:.4f}; pearson r={r[0]:.4f}/{r[1]:.4f}/{r[2]:.4f}")


def test_criterion_3_targeted_attack(synth, verdict):
    events, roster, an, gen_seconds = synth
    t0 = time.perf_counter()
    g = build_graph(events)
    full = network_summary(g)
    top = network_summary(apply_removal(g, select_removal_set(g, RemovalStrategy.parse("top1"))))
    bottom = network_summary(apply_removal(g, select_removal_set(g, RemovalStrategy.parse("bottom"))))
    elapsed = gen_seconds + time.perf_counter() - t0
    adarp_factor = top.adarp / full.adarp
    cc_factor = top.clustering / full.clustering
    bottom_change = abs(bottom.adarp / full.adarp - 1)
    ok = adarp_factor >= 1.5 and cc_factor <= 0.5 and bottom_change < 0.10 and elapsed < 60
    verdict(3, ok, f"top1 ADARP {full.adarp:.3f}->{top.adarp:.3f} (x{adarp_factor:.2f}), "
                   f"CC {full.clustering:.4f}->{top.clustering:.4f} (x{cc_factor:.2f}); "
                   f"bottom ADARP change {bottom_change:.1%}; {elapsed:.1f}s")


def test_criterion_4_stability(synth, verdict):
    events, roster, an, _ = synth
    reps = {s: run_strategy(an, RemovalStrategy.parse(s), roster) for s in ("bottom", "spammers", "top10")}
    deg_bottom = reps["bottom"].r("degree")
    deg_spam = reps["spammers"].r("degree")
    ci_bottom = reps["bottom"].r("contribution_index")
    ci_top = reps["top10"].r("contribution_index")
    ok = deg_bottom >= 0.95 and deg_spam >= 0.95 and ci_top <= ci_bottom - 0.2
    verdict(4, ok, f"degree r bottom {deg_bottom:.4f}, spammers {deg_spam:.4f}; "
                   f"CI r top10 {ci_top:.3f} vs bottom {ci_bottom:.3f}")


def test_criterion_5_role_recovery(synth, verdict):
    events, roster, an, _ = synth
    verdicts = detect_spammers(an.graph, an.metrics, events)
    flagged = {v for v, x in verdicts.items() if x.is_spammer}
    tp = len(flagged & roster.spammers)
    fp_rate = len(flagged - roster.spammers) / (an.graph.n - len(roster.spammers))
    ci_ok = all(verdicts[v].ci_consistent for v in flagged)
    rows = {r.metric: r for r in moderator_fingerprint(an.metrics, roster.moderators)}
    fp_ok = all(rows[m].significant and rows[m].direction == "higher" for m in ("degree", "betweenness"))
    top_decile = [v for v, _ in rank_moderator_candidates(an.metrics).ranking[: an.graph.n // 10]]
    mod_share = len(set(top_decile) & roster.moderators) / len(roster.moderators)
    ok = tp >= 9 and fp_rate <= 0.01 and ci_ok and fp_ok and mod_share >= 0.8
    verdict(5, ok, f"spammers {tp}/10 found, FP rate {fp_rate:.2%}, CI>0.7 {ci_ok}; "
                   f"degree p={rows['degree'].p:.1e} betweenness p={rows['betweenness'].p:.1e}; "
                   f"moderators in top decile {mod_share:.0%}")


@st.composite
def _corpora(draw):
    events = []
    for i in range(draw(st.integers(1, 20))):
        parent = None
        if events and draw(st.booleans()):
            parent = events[draw(st.integers(0, len(events) - 1))].message_id
        events.append(msg(f"m{i}", draw(st.sampled_from("abcdef")), i * 3600, parent=parent,
                          sentiment=draw(st.floats(0, 1))))
    return events


_samples = st.lists(st.floats(-100, 100), min_size=3, max_size=8)


@settings(max_examples=40, deadline=None)
@given(_corpora())
def _ci_property(events):
    for f in activity_and_contribution(events).values():
        assert -1 <= f["contribution_index"] <= 1
        assert (f["contribution_index"] == 1) == (f["received"] == 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=12))
def _oscillation_property(series):
    compressed = [x for i, x in enumerate(series) if i == 0 or x != series[i - 1]]
    assert count_oscillations(series) <= max(0, len(compressed) - 2)


@settings(max_examples=40, deadline=None)
@given(_samples, _samples, st.floats(0.1, 10), st.floats(-10, 10))
def _affine_property(a, b, scale, shift):
    if np.var(a) < 1e-3 or np.var(b) < 1e-3:
        return
    t0, t1 = welch_t_test(a, b), welch_t_test([scale * x + shift for x in a], [scale * x + shift for x in b])
    assert math.isclose(t0.t, t1.t, rel_tol=1e-6, abs_tol=1e-6)
    assert math.isclose(t0.p, t1.p, rel_tol=1e-5, abs_tol=1e-9)
    k = min(len(a), len(b))
    x, y = a[:k], b[:k]
    if np.var(x) < 1e-3 or np.var(y) < 1e-3:
        return
    r0, r1 = pearson(x, y), pearson([scale * v + shift for v in x], y)
    assert math.isclose(r0.r, r1.r, abs_tol=1e-7)


@settings(max_examples=15, deadline=None)
@given(_corpora())
def _empty_removal_property(events):
    rep = run_strategy(analyze(events), RemovalStrategy.parse("none"))
    assert all(abs(c.r - 1) < 1e-9 for c in rep.correlations.values() if c.defined)


def _union_relation():
    core = [f"c{i}" for i in range(10)]
    arcs = [(core[i], core[(i + 1) % 10]) for i in range(10)] + [(core[(i + 1) % 10], core[i]) for i in range(10)]
    mods = [f"m{i:02d}" for i in range(83)]
    arcs += [(m, "c0") for m in mods] + [(m, "c1") for m in mods[:75]]
    arcs += [(f"l{i:03d}", "c2") for i in range(117)]
    g = build_graph(events_from_arcs(arcs))
    from forumnet.ingest import Roster

    roster = Roster({m: "moderator" for m in mods})
    sizes = [len(select_removal_set(g, RemovalStrategy.parse(s), roster))
             for s in ("moderators", "bottom", "moderators+bottom")]
    assert sizes == [83, 125, 200], sizes


def test_criterion_6_invariants(verdict):
    checks = {
        "CI range and CI=1 iff received=0": _ci_property,
        "oscillations <= compressed length - 2": _oscillation_property,
        "t-test/pearson affine invariance": _affine_property,
        "empty removal gives r=1": _empty_removal_property,
        "union 83 + 125 -> 200": _union_relation,
    }
    failed = []
    for name, check in checks.items():
        try:
            check()
        except Exception as exc:  # report every broken invariant, not just the first
            failed.append(f"{name}: {type(exc).__name__}")
    verdict(6, not failed, f"{len(checks) - len(failed)}/{len(checks)} invariant suites hold"
                           + (f"; failed: {failed}" if failed else ""))


def test_criterion_7_determinism(tmp_path, verdict):
    gen_flags = ["--seed", "2024", "--set", "n_users=400", "--set", "n_messages=8000"]
    outputs = []
    for run in ("a", "b"):
        base = tmp_path / run
        assert cli_main(["generate", "--out", str(base / "corpus")] + gen_flags) == 0
        assert cli_main([
            "stability", "--messages", str(base / "corpus" / "messages.csv"),
            "--roster", str(base / "corpus" / "roster.csv"), "--out", str(base / "reports"),
        ]) == 0
        outputs.append({p.relative_to(base): p.read_bytes() for p in sorted(base.rglob("*")) if p.is_file()})
    same = outputs[0] == outputs[1]
    verdict(7, same, f"{len(outputs[0])} files compared, "
                     f"{sum(outputs[0][k] != outputs[1].get(k) for k in outputs[0])} differ")


def test_criterion_8_golden_row(verdict):
    full = NetworkSummary(n=3200, arc_count=6840, adarp=3.301, diameter=9, clustering=0.586, avg_degree=4.275)
    line = render_table(SUMMARY_HEADER, summary_rows(full, [])).splitlines()[1]
    expected = "3.301, 0.586, 4.275, 9"
    verdict(8, line.endswith(expected), f"rendered row {line!r}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
