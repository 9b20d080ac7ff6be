"""Batch command line: ``forumnet {analyze,stability,fingerprint,generate}``.

Exit codes: 0 success, 1 data error (unreadable or invalid input, missing
labels), 2 usage error (bad flags).
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .experiments import PAPER_STRATEGIES, RemovalStrategy, StrategyError, analyze, stability_analysis
from .graph import DIRECTED, UNDIRECTED
from .ingest import ForumDataError, parse_message_log, parse_roster, write_message_log, write_roster
from .nodemetrics import MetricConfig, write_node_metrics
from .reports import (
    FINGERPRINT_HEADER,
    SEP,
    SUMMARY_HEADER,
    candidate_rows,
    fingerprint_rows,
    render_reports,
    render_table,
    summary_rows,
    write_manifest,
)
from .roles import detect_spammers, moderator_fingerprint, pool_networks, rank_moderator_candidates
from .semantic import parse_lexicon
from .synthgen import SynthConfig, generate_forum

logger = logging.getLogger("forumnet")

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2

_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400, "w": 7 * 86400}


class DataError(Exception):
    """Problem with the input data; maps to exit code 1."""


def parse_duration(text: str) -> int:
    """``7d``, ``12h``, ``30m``, ``3600s`` or bare seconds; must be positive."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([smhdw]?)\s*", text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}; use e.g. 7d, 12h, 30m, 3600s")
    seconds = float(m.group(1)) * _UNITS[m.group(2) or "s"]
    if seconds <= 0 or seconds != int(seconds):
        raise argparse.ArgumentTypeError(f"duration must be a positive whole number of seconds, got {text!r}")
    return int(seconds)


def _percentile(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError(f"percentile must lie in [0, 1], got {p}")
    return p


def _non_negative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_int(text: str) -> int:
    v = _non_negative_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _strategy_list(text: str) -> list[RemovalStrategy]:
    tokens = [t for t in (s.strip() for s in text.split(",")) if t]
    if not tokens:
        raise argparse.ArgumentTypeError("strategy list is empty")
    try:
        return [RemovalStrategy.parse(t) for t in tokens]
    except StrategyError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_events(path: str, fmt: str):
    result = parse_message_log(_read(path), fmt)
    for diag in result.diagnostics:
        logger.warning("%s: %s", path, diag)
    if result.rejected:
        print(f"{path}: {result.rejected} of {result.n_records} records rejected", file=sys.stderr)
    if not result.events:
        raise DataError(f"{path}: no valid messages")
    return result.events


def _metric_config(args) -> MetricConfig:
    lexicon = parse_lexicon(_read(args.lexicon)) if args.lexicon else None
    return MetricConfig(direction=args.direction, window=args.window, lexicon=lexicon)


def _ext(args) -> str:
    return ".csv" if args.report_format == "delimited" else ".txt"


def _settings(args, extra: Optional[dict] = None) -> dict:
    out = {
        "command": args.command,
        "direction": args.direction,
        "window_seconds": args.window,
        "message_format": args.format,
        "report_format": args.report_format,
    }
    out.update(extra or {})
    return out


def _inputs(args) -> dict:
    inputs = {}
    for i, p in enumerate(args.messages):
        inputs["messages" if len(args.messages) == 1 else f"messages{i + 1}"] = p
    rosters = getattr(args, "roster", None) or []
    if isinstance(rosters, str):
        rosters = [rosters]
    for i, p in enumerate(rosters):
        inputs["roster" if len(rosters) == 1 else f"roster{i + 1}"] = p
    inputs["lexicon"] = args.lexicon
    return inputs


def cmd_analyze(args) -> int:
    events = _load_events(args.messages[0], args.format)
    analysis = analyze(events, _metric_config(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "node_metrics.csv", "w", encoding="utf-8", newline="") as fh:
        write_node_metrics(analysis.metrics, fh)
    (out / f"network_summary{_ext(args)}").write_text(
        render_table(SUMMARY_HEADER, summary_rows(analysis.summary, []), args.report_format), encoding="utf-8"
    )
    write_manifest(out / "run_manifest.txt", _settings(args), _inputs(args), __version__)
    print(f"analyzed {analysis.graph.n} nodes, {len(analysis.graph.arcs)} arcs -> {out}")
    return EXIT_OK


def _write_spam_verdicts(path: Path, verdicts) -> None:
    lines = [SEP.join(("node", "conditions", "spammer", "ci_above_0.7"))]
    for node in sorted(verdicts):
        v = verdicts[node]
        if v.conditions:
            lines.append(SEP.join((node, "".join(sorted(v.conditions)), "yes" if v.is_spammer else "no",
                                   "yes" if v.ci_consistent else "no")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_stability(args) -> int:
    events = _load_events(args.messages[0], args.format)
    roster = parse_roster(_read(args.roster)) if args.roster else None
    analysis = analyze(events, _metric_config(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spammers = None
    if args.detect_spammers:
        verdicts = detect_spammers(analysis.graph, analysis.metrics, events, args.percentile, args.max_answers)
        spammers = {v for v, x in verdicts.items() if x.is_spammer}
        print(f"detected {len(spammers)} spammers")
        _write_spam_verdicts(out / f"spammers{_ext(args)}", verdicts)
    try:
        reports = stability_analysis(analysis, args.strategies, roster, spammers, workers=args.threads)
    except StrategyError as exc:
        raise DataError(f"{exc}; moderator labels come from --roster, spammer labels from --roster or --detect-spammers") from None
    render_reports(out, analysis.summary, reports, format=args.report_format)
    settings = {
        "strategies": ",".join(s.label for s in args.strategies),
        "detect_spammers": args.detect_spammers,
        "activity_percentile": args.percentile,
        "max_nonspam_answers": args.max_answers,
    }
    write_manifest(out / "run_manifest.txt", _settings(args, settings), _inputs(args), __version__)
    for rep in reports:
        print(f"{rep.strategy}: removed {rep.removed_count} nodes")
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    if len(args.roster) not in (1, len(args.messages)):
        raise DataError("give one --roster for all message logs or one per --messages")
    rosters = [parse_roster(_read(p)) for p in args.roster]
    tables, moderators = [], set()
    config = _metric_config(args)
    for i, path in enumerate(args.messages):
        events = _load_events(path, args.format)
        roster = rosters[i if len(rosters) > 1 else 0]
        table = analyze(events, config).metrics
        tables.append(table)
        prefix = f"{i}:" if len(args.messages) > 1 else ""
        moderators |= {prefix + v for v in roster.moderators if v in table.index}
    metrics = pool_networks(tables) if len(tables) > 1 else tables[0]
    if len(moderators) < 2:
        print(f"warning: only {len(moderators)} moderator(s) found; fingerprint rows stay untested", file=sys.stderr)
    rows = moderator_fingerprint(metrics, moderators)
    ranking = rank_moderator_candidates(metrics)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"fingerprint{_ext(args)}").write_text(
        render_table(FINGERPRINT_HEADER, fingerprint_rows(rows), args.report_format), encoding="utf-8"
    )
    (out / f"candidates{_ext(args)}").write_text(
        render_table(("rank", "node", "score"), candidate_rows(ranking), args.report_format), encoding="utf-8"
    )
    write_manifest(out / "run_manifest.txt", _settings(args), _inputs(args), __version__)
    n_sig = sum(r.significant for r in rows)
    print(f"{n_sig} of {len(rows)} metrics differ significantly for {len(moderators)} moderators")
    return EXIT_OK


def cmd_generate(args) -> int:
    values = {}
    if args.config:
        values.update(asdict(SynthConfig.from_text(_read(args.config))))
    for item in args.set:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"--set expects key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        values[key] = value
    if args.seed is not None:
        values["seed"] = args.seed
    config = SynthConfig.from_mapping(values)
    events, roster = generate_forum(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = "jsonl" if args.format == "jsonl" else "csv"
    with open(out / f"messages.{ext}", "w", encoding="utf-8", newline="") as fh:
        write_message_log(events, fh, args.format)
    with open(out / "roster.csv", "w", encoding="utf-8", newline="") as fh:
        write_roster(roster, fh)
    (out / "generator_config.txt").write_text(config.to_text(), encoding="utf-8")
    print(f"seed: {config.seed}")
    print(f"wrote {len(events)} messages by {config.n_users} users -> {out}")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, multi: bool = False) -> None:
    p.add_argument("--messages", required=True, action="append" if multi else None,
                   help="message log" + (" (repeat to pool networks)" if multi else ""))
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="message log format")
    p.add_argument("--lexicon", help="word,polarity table for messages without a sentiment score")
    p.add_argument("--direction", choices=(DIRECTED, UNDIRECTED), default=DIRECTED,
                   help="path mode for distances and centralities")
    p.add_argument("--window", type=parse_duration, default=parse_duration("7d"),
                   help="oscillation window, e.g. 7d, 12h (default 7d)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--report-format", choices=("delimited", "text"), default="delimited")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forumnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-node metrics and network summary")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stability", help="node-removal robustness and stability reports")
    _add_common(p)
    p.add_argument("--roster", help="author_id,role table")
    p.add_argument("--strategies", type=_strategy_list, default=_strategy_list(",".join(PAPER_STRATEGIES)),
                   help="comma-separated removal strategies, e.g. top1,bottom,moderators+spammers")
    p.add_argument("--detect-spammers", action="store_true", help="label spammers by the behavioural rule")
    p.add_argument("--percentile", type=_percentile, default=0.99, help="activity percentile for spammer rule (a)")
    p.add_argument("--max-answers", type=_non_negative_int, default=1,
                   help="most non-spammer answers a spammer may receive (rule b)")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker processes for strategies")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("fingerprint", help="moderator t-tests and candidate ranking")
    _add_common(p, multi=True)
    p.add_argument("--roster", required=True, action="append", help="roster (one, or one per --messages)")
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("generate", help="write a synthetic corpus and its roster")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="key = value generator settings file")
    p.add_argument("--seed", type=int, help="RNG seed (overrides the config file)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one setting")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if isinstance(getattr(args, "messages", None), str):
        args.messages = [args.messages]
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DataError, ForumDataError, StrategyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (argparse.ArgumentTypeError, ValueError) as exc:
        # bad generator settings are usage errors; elsewhere the data is at fault
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if args.command == "generate" else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
