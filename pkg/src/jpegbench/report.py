"""Report rendering: Markdown tables and SVG figures from a summary.

Output is a pure function of the AnalysisSummary: stable file names,
stable row order, fixed rounding, and deterministic SVG (fixed hash salt,
no timestamps), so regenerating a report from the same raw results is
byte-identical. Every number shown is a summary value after the declared
rounding; the renderer never computes statistics of its own.

Rounding: throughput 0 decimals, normalized percents 1 decimal, rank
correlation 2 decimals, gap percents 1 decimal.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import AnalysisSummary, PlatformAnalysis
from .results import atomic_write_text

SVG_HASH_SALT = "jpegbench"

TABLE_FILES = (
    "tab01_hardware.md",
    "tab02_single_thread.md",
    "tab03_peak_loader.md",
    "tab04_worker_delta.md",
    "tab05_robustness.md",
    "tab06_tier.md",
    "tab07_guidance.md",
)

FIGURE_FILES = (
    "fig01_rank_change.svg",
    "fig02_worker_delta.svg",
    "fig03_penalty.svg",
    "fig04_recommendation.svg",
)

REPORT_INDEX = "report.md"

MISSING = "-"

NO_LOADER_NOTICE = (
    "No loader measurements are present in this result set, so this table "
    "has no rows. Re-run with the loader protocol enabled to populate it."
)


def fmt_throughput(value: float) -> str:
    return f"{value:.0f}"


def fmt_mean_std(mean: float, std: float | None) -> str:
    if std is None:
        return fmt_throughput(mean)
    return f"{fmt_throughput(mean)} ± {fmt_throughput(std)}"


def fmt_pct(fraction: float) -> str:
    """Fraction of the winner -> percent with 1 decimal."""
    return f"{fraction * 100.0:.1f}"


def fmt_gap(gap_pct: float) -> str:
    return f"{gap_pct:.1f}"


def fmt_rho(value: float) -> str:
    return f"{value:.2f}"


def fmt_rank(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.1f}"


def fmt_speedup(value: float) -> str:
    return f"{value:.2f}x"


def markdown_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(" --- " for _ in header) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def _scoped(title: str, body: str, scope: str) -> str:
    return f"## {title}\n\n{body}\n*Claim scope: {scope}*\n"


def _adapters_union(summary: AnalysisSummary, kind: str) -> list[str]:
    names: set[str] = set()
    for analysis in summary.platforms.values():
        names |= set(getattr(analysis, kind))
    return sorted(names)


def _has_loader_data(summary: AnalysisSummary) -> bool:
    return any(a.sweeps for a in summary.platforms.values())


# ---------------------------------------------------------------------------
# Tables


def render_hardware_table(summary: AnalysisSummary) -> str:
    rows = []
    for label, analysis in summary.platforms.items():
        p = analysis.platform
        rows.append(
            [
                label,
                p.cpu_model,
                str(p.vcpu_count),
                p.microarchitecture_label,
                p.os_description,
                p.runtime_version,
                str(analysis.corpus.item_count),
                f"{analysis.corpus.total_bytes / 1e6:.1f}",
            ]
        )
    body = markdown_table(
        ["Platform", "CPU", "vCPUs", "Arch", "OS", "Runtime", "Items", "Corpus MB"],
        rows,
    )
    return _scoped(
        "Platforms under test",
        body,
        "measurement context; describes the machines, not decoder performance.",
    )


def render_single_thread_table(summary: AnalysisSummary) -> str:
    labels = list(summary.platforms)
    rows = []
    for adapter in _adapters_union(summary, "single"):
        row = [adapter]
        for label in labels:
            stats = summary.platforms[label].single.get(adapter)
            row.append(MISSING if stats is None else fmt_mean_std(stats.mean, stats.std))
        rows.append(row)
    body = markdown_table(["Adapter"] + labels, rows)
    extra = []
    for label in labels:
        diag = summary.platforms[label].diagnostics
        if diag is not None and diag.spearman is not None:
            extra.append(
                f"- {label}: rank correlation between protocols "
                f"{fmt_rho(diag.spearman)}"
            )
    if extra:
        body += "\n" + "\n".join(extra) + "\n"
    return _scoped(
        "Single-thread decode throughput (images/s, mean ± std)",
        body,
        "component speed only; this ordering does not transfer to "
        "worker-parallel loading.",
    )


def render_peak_loader_table(summary: AnalysisSummary) -> str:
    if not _has_loader_data(summary):
        return _scoped(
            "Peak loader throughput", NO_LOADER_NOTICE + "\n", "loader-scale data only."
        )
    labels = list(summary.platforms)
    rows = []
    for adapter in _adapters_union(summary, "peaks"):
        row = [adapter]
        for label in labels:
            peak = summary.platforms[label].peaks.get(adapter)
            if peak is None:
                row.append(MISSING)
            else:
                row.append(f"{fmt_throughput(peak.mean)} @w{peak.worker_count}")
        rows.append(row)
    body = markdown_table(["Adapter"] + labels, rows)
    gap_lines = []
    for label in labels:
        gap = summary.platforms[label].gap
        if gap is None or gap.gap_pct is None:
            continue
        gap_lines.append(
            f"- {label}: single-thread leader {gap.single_leader} reaches "
            f"{fmt_throughput(gap.single_leader_peak)} img/s at loader scale, "
            f"{fmt_gap(gap.gap_pct)}% below loader leader {gap.loader_leader} "
            f"({gap.verdict} at the loader threshold)"
        )
    if gap_lines:
        body += "\n" + "\n".join(gap_lines) + "\n"
    return _scoped(
        "Peak loader throughput (images/s at best worker count)",
        body,
        "loader-scale throughput; the quantity that decides deployment.",
    )


def render_worker_delta_table(summary: AnalysisSummary) -> str:
    if not _has_loader_data(summary):
        return _scoped(
            "Worker-count peaks", NO_LOADER_NOTICE + "\n", "loader-scale data only."
        )
    rows = []
    worker_counts = sorted(
        {
            w
            for analysis in summary.platforms.values()
            if analysis.worker_summary
            for w in analysis.worker_summary.peak_counts
        }
    )
    for label, analysis in summary.platforms.items():
        ws = analysis.worker_summary
        if ws is None:
            rows.append([label] + [MISSING] * (len(worker_counts) + 1))
            continue
        row = [label]
        for w in worker_counts:
            row.append(str(ws.peak_counts.get(w, 0)))
        row.append(fmt_speedup(ws.mean_peak_speedup))
        rows.append(row)
    body = markdown_table(
        ["Platform"] + [f"peaks @w{w}" for w in worker_counts] + ["Mean peak speedup"],
        rows,
    )
    return _scoped(
        "Where sweeps peak, per platform",
        body,
        "CPU-generation-specific worker policy; peak locations do not "
        "transfer across platforms.",
    )


def render_robustness_table(summary: AnalysisSummary) -> str:
    labels = list(summary.platforms)
    adapters = sorted(
        {
            adapter
            for analysis in summary.platforms.values()
            for adapter in analysis.skip_reports
        }
    )
    rows = []
    for adapter in adapters:
        row = [adapter]
        for label in labels:
            report = summary.platforms[label].skip_reports.get(adapter)
            row.append(MISSING if report is None else str(report.skip_count))
        rows.append(row)
    body = markdown_table(["Adapter"] + labels, rows)
    detail = []
    for label in labels:
        for adapter in adapters:
            report = summary.platforms[label].skip_reports.get(adapter)
            if report is None or report.skip_count == 0:
                continue
            shown = ", ".join(str(i) for i in report.skipped_indices[:5])
            more = "" if report.skip_count <= 5 else f" (+{report.skip_count - 5} more)"
            first_reason = report.reasons[report.skipped_indices[0]]
            detail.append(
                f"- {label} / {adapter}: items [{shown}]{more}; "
                f"first reason: {first_reason}"
            )
    if detail:
        body += "\n" + "\n".join(detail) + "\n"
    return _scoped(
        "Skipped items per adapter (identical across protocols by construction)",
        body,
        "operational robustness; a skip is a clean refusal, not a crash, "
        "and skipped work is excluded from every throughput numerator.",
    )


def render_tier_table(summary: AnalysisSummary) -> str:
    if not _has_loader_data(summary):
        return _scoped(
            "Cross-platform recommendation tier",
            NO_LOADER_NOTICE + "\n",
            "loader-scale top tier.",
        )
    floor = summary.tier_policy.normalized_floor
    if not summary.tier:
        body = (
            f"No adapter clears the tier conditions (zero skips everywhere, "
            f"loader-eligible everywhere, normalized peak >= {fmt_pct(floor)}% "
            f"on every platform).\n"
        )
    else:
        rows = [
            [
                entry.adapter,
                fmt_pct(entry.mean_normalized),
                fmt_pct(entry.min_normalized),
                fmt_pct(entry.max_normalized),
            ]
            for entry in summary.tier
        ]
        body = markdown_table(
            ["Adapter", "Mean (% of winner)", "Min (%)", "Max (%)"], rows
        )
        body += (
            f"\nConditions: zero skips on every platform, loader-eligible "
            f"everywhere, normalized peak >= {fmt_pct(floor)}% everywhere.\n"
        )
    return _scoped(
        "Cross-platform recommendation tier (normalized loader peak)",
        body,
        "loader-scale top tier; membership bundles throughput, robustness, "
        "and eligibility, not throughput alone.",
    )


def render_guidance_table(summary: AnalysisSummary) -> str:
    if not _has_loader_data(summary):
        return _scoped(
            "Per-platform guidance", NO_LOADER_NOTICE + "\n", "loader-scale data only."
        )
    rows = []
    for label in summary.guidance:
        entries = summary.guidance[label]
        cells = [label]
        for position in range(3):
            if position < len(entries):
                e = entries[position]
                cells.append(
                    f"{e.adapter} (w={e.worker_count}, "
                    f"{fmt_throughput(e.peak_mean)} img/s)"
                )
            else:
                cells.append(MISSING)
        rows.append(cells)
    body = markdown_table(["Platform", "First choice", "Second", "Third"], rows)
    return _scoped(
        "Per-platform top-3 loader configurations (zero-skip adapters)",
        body,
        "per-platform starting points, not universal recommendations.",
    )


TABLE_RENDERERS = (
    render_hardware_table,
    render_single_thread_table,
    render_peak_loader_table,
    render_worker_delta_table,
    render_robustness_table,
    render_tier_table,
    render_guidance_table,
)


# ---------------------------------------------------------------------------
# Figures


def _deterministic_rc():
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    plt.rcParams["figure.dpi"] = 100


def _save(fig, path: Path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _placeholder(fig, text: str):
    fig.text(0.5, 0.5, text, ha="center", va="center")


def render_rank_change_figure(summary: AnalysisSummary, path: Path):
    platforms = [
        (label, a.diagnostics)
        for label, a in summary.platforms.items()
        if a.diagnostics is not None
    ]
    if not platforms:
        fig = plt.figure(figsize=(8, 3))
        _placeholder(fig, "no dual-protocol measurements")
        _save(fig, path)
        return
    fig, axes = plt.subplots(
        1, len(platforms), figsize=(3.2 * len(platforms), 4.0), sharey=False
    )
    if len(platforms) == 1:
        axes = [axes]
    for ax, (label, diag) in zip(axes, platforms):
        moves = sorted(diag.moves, key=lambda m: m.adapter)
        names = [m.adapter for m in moves]
        deltas = [m.delta for m in moves]
        ax.barh(range(len(names)), deltas, color="#4878a8")
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=7)
        ax.axvline(0.0, color="black", linewidth=0.8)
        rho = "" if diag.spearman is None else f" (rho={fmt_rho(diag.spearman)})"
        ax.set_title(label + rho, fontsize=8)
        ax.set_xlabel("rank gain under loader", fontsize=7)
        ax.invert_yaxis()
    fig.suptitle("Rank change: single-thread vs loader peak", fontsize=10)
    fig.tight_layout(rect=(0, 0, 1, 0.94))
    _save(fig, path)


def render_worker_delta_figure(summary: AnalysisSummary, path: Path):
    platforms = [
        (label, a.worker_summary)
        for label, a in summary.platforms.items()
        if a.worker_summary is not None
    ]
    if not platforms:
        fig = plt.figure(figsize=(8, 3))
        _placeholder(fig, "no loader sweeps with a w=0 baseline")
        _save(fig, path)
        return
    worker_counts = sorted({w for _, ws in platforms for w in ws.peak_counts})
    fig, ax = plt.subplots(figsize=(8, 4))
    width = 0.8 / max(1, len(worker_counts))
    for offset, w in enumerate(worker_counts):
        xs = [i + offset * width for i in range(len(platforms))]
        ys = [ws.peak_counts.get(w, 0) for _, ws in platforms]
        ax.bar(xs, ys, width=width, label=f"w={w}")
    centers = [i + 0.4 - width / 2 for i in range(len(platforms))]
    ax.set_xticks(centers)
    ax.set_xticklabels(
        [f"{label}\nmean {fmt_speedup(ws.mean_peak_speedup)}" for label, ws in platforms],
        fontsize=7,
    )
    ax.set_ylabel("adapters peaking at this worker count", fontsize=8)
    ax.legend(fontsize=7)
    ax.set_title("Sweep peak locations per platform", fontsize=10)
    fig.tight_layout()
    _save(fig, path)


def render_penalty_figure(summary: AnalysisSummary, path: Path):
    gaps = [
        (label, a.gap)
        for label, a in summary.platforms.items()
        if a.gap is not None and a.gap.gap_pct is not None
    ]
    if not gaps:
        fig = plt.figure(figsize=(8, 3))
        _placeholder(fig, "leader gap undefined for this result set")
        _save(fig, path)
        return
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = range(len(gaps))
    ys = [gap.gap_pct for _, gap in gaps]
    ax.bar(xs, ys, color="#a85448")
    threshold_pct = summary.policy.loader_threshold * 100.0
    ax.axhline(
        threshold_pct,
        color="black",
        linestyle="--",
        linewidth=0.8,
        label=f"practical threshold {fmt_gap(threshold_pct)}%",
    )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(
        [f"{label}\n({gap.verdict})" for label, gap in gaps], fontsize=7
    )
    ax.set_ylabel("loader-scale cost of the single-thread pick (%)", fontsize=8)
    ax.set_title("Penalty for choosing by single-thread rank", fontsize=10)
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)


def render_recommendation_figure(summary: AnalysisSummary, path: Path):
    if not summary.tier:
        fig = plt.figure(figsize=(8, 3))
        _placeholder(fig, "recommendation tier is empty for this result set")
        _save(fig, path)
        return
    fig, ax = plt.subplots(figsize=(8, 0.7 * len(summary.tier) + 2))
    names = [e.adapter for e in summary.tier]
    means = [e.mean_normalized * 100.0 for e in summary.tier]
    lower = [(e.mean_normalized - e.min_normalized) * 100.0 for e in summary.tier]
    upper = [(e.max_normalized - e.mean_normalized) * 100.0 for e in summary.tier]
    ys = range(len(names))
    ax.errorbar(
        means, ys, xerr=[lower, upper], fmt="o", color="#48784a", capsize=4
    )
    floor_pct = summary.tier_policy.normalized_floor * 100.0
    ax.axvline(
        floor_pct,
        color="black",
        linestyle="--",
        linewidth=0.8,
        label=f"tier floor {fmt_pct(summary.tier_policy.normalized_floor)}%",
    )
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("normalized loader peak (% of platform winner)", fontsize=8)
    ax.set_title("Cross-platform recommendation tier (min/mean/max)", fontsize=10)
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)


FIGURE_RENDERERS = (
    render_rank_change_figure,
    render_worker_delta_figure,
    render_penalty_figure,
    render_recommendation_figure,
)


# ---------------------------------------------------------------------------
# Whole-report assembly


def render_index(summary: AnalysisSummary, tables: list[str]) -> str:
    policy = summary.policy
    lines = [
        "# Image decode benchmark report",
        "",
        f"Platforms: {len(summary.platforms)}. "
        f"A difference is called real only beyond "
        f"{policy.single_thread_threshold * 100.0:.0f}% (single-thread) or "
        f"{policy.loader_threshold * 100.0:.0f}% (loader) of the slower mean; "
        f"anything closer is reported as tied.",
        "",
    ]
    for table in tables:
        lines.append(table)
    lines.append("## Figures")
    lines.append("")
    for name in FIGURE_FILES:
        lines.append(f"![{name}]({name})")
    lines.append("")
    if summary.notes:
        lines.append("## Notes")
        lines.append("")
        for note in summary.notes:
            lines.append(f"- {note}")
        lines.append("")
    return "\n".join(lines)


def write_report(summary: AnalysisSummary, outdir: str | Path) -> list[Path]:
    """Render every table and figure; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _deterministic_rc()

    written: list[Path] = []
    tables = []
    for filename, renderer in zip(TABLE_FILES, TABLE_RENDERERS):
        text = renderer(summary)
        tables.append(text)
        path = outdir / filename
        atomic_write_text(path, text)
        written.append(path)

    for filename, renderer in zip(FIGURE_FILES, FIGURE_RENDERERS):
        path = outdir / filename
        renderer(summary, path)
        written.append(path)

    index_path = outdir / REPORT_INDEX
    atomic_write_text(index_path, render_index(summary, tables))
    written.append(index_path)
    return written
