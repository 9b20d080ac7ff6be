"""Table-shaped report files.

Delimited reports separate fields with ``", "``. Numbers are formatted with
fixed precision so identical inputs give identical bytes: three decimals for
ADARP, clustering, average degree and correlations; integers for counts and
the diameter.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .experiments import STABILITY_METRICS, StabilityReport
from .roles import CandidateRanking, FingerprintRow
from .structural import NetworkSummary

SEP = ", "
SUMMARY_HEADER = ("strategy", "removed_count", "removed_pct", "adarp", "cc", "ad", "d")
FINGERPRINT_HEADER = ("metric", "mod_mean", "other_mean", "t", "df", "p", "significant", "direction")


def fixed3(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.3f}"


def sig6(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6g}"


def summary_cells(summary: NetworkSummary) -> list[str]:
    return [
        fixed3(summary.adarp),
        fixed3(summary.clustering),
        fixed3(summary.avg_degree),
        "" if summary.diameter is None else str(summary.diameter),
    ]


def summary_rows(full: NetworkSummary, reports: Sequence[StabilityReport]) -> list[list[str]]:
    rows = [["full", "0", "0.0%"] + summary_cells(full)]
    for rep in reports:
        rows.append([rep.strategy, str(rep.removed_count), f"{rep.removed_pct * 100:.1f}%"] + summary_cells(rep.after))
    return rows


def stability_rows(reports: Sequence[StabilityReport], metrics=STABILITY_METRICS) -> list[list[str]]:
    rows = []
    if not reports:
        return rows
    for m in metrics:
        rows.append([m] + [fixed3(rep.correlations[m].r) if m in rep.correlations else "" for rep in reports])
    return rows


def stability_detail_rows(reports: Sequence[StabilityReport]) -> list[list[str]]:
    rows = []
    for rep in reports:
        for m, c in rep.correlations.items():
            rows.append([rep.strategy, m, fixed3(c.r), sig6(c.p), str(c.k), c.reason])
    return rows


def fingerprint_rows(rows: Sequence[FingerprintRow]) -> list[list[str]]:
    out = []
    for row in rows:
        if not row.tested:
            out.append([row.metric, "", "", "", "", "", "untested", ""])
            continue
        out.append([
            row.metric,
            sig6(row.mod_mean),
            sig6(row.other_mean),
            sig6(row.t),
            sig6(row.df),
            sig6(row.p),
            "yes" if row.significant else "no",
            row.direction,
        ])
    return out


def candidate_rows(ranking: CandidateRanking) -> list[list[str]]:
    return [[str(i), node, f"{score:.6f}"] for i, (node, score) in enumerate(ranking.ranking, 1)]


def render_table(header: Sequence[str], rows: Sequence[Sequence[str]], format: str = "delimited") -> str:
    if format == "delimited":
        return "".join(SEP.join(r) + "\n" for r in [list(header)] + [list(r) for r in rows])
    if format == "text":
        table = [list(header)] + [list(r) for r in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        lines = []
        for j, r in enumerate(table):
            cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
            if j == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def _write(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def render_reports(
    out_dir,
    full: NetworkSummary,
    stability: Sequence[StabilityReport] = (),
    fingerprint: Optional[Sequence[FingerprintRow]] = None,
    format: str = "delimited",
) -> list[Path]:
    """Write ``network_summary``, ``stability`` (+ ``stability_detail``) and,
    when given, ``fingerprint``. Returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = ".csv" if format == "delimited" else ".txt"
    written = [
        _write(out / f"network_summary{ext}", render_table(SUMMARY_HEADER, summary_rows(full, stability), format)),
        _write(
            out / f"stability{ext}",
            render_table(["metric"] + [r.strategy for r in stability], stability_rows(stability), format),
        ),
        _write(
            out / f"stability_detail{ext}",
            render_table(("strategy", "metric", "r", "p", "pairs", "note"), stability_detail_rows(stability), format),
        ),
    ]
    if fingerprint is not None:
        written.append(
            _write(out / f"fingerprint{ext}", render_table(FINGERPRINT_HEADER, fingerprint_rows(fingerprint), format))
        )
    return written


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, settings: Mapping[str, object], inputs: Mapping[str, object], version: str) -> Path:
    """Settings echo plus SHA-256 digests of the inputs. No timestamps."""
    lines = [f"tool_version = {version}"]
    for key in sorted(settings):
        lines.append(f"{key} = {settings[key]}")
    for name in sorted(inputs):
        p = inputs[name]
        if p is None:
            continue
        lines.append(f"input.{name} = {Path(p).name} sha256:{file_digest(p)}")
    return _write(Path(path), "\n".join(lines) + "\n")
