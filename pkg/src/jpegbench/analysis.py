"""Derived statistics over merged raw results.

Everything downstream of measurement lives here: summary statistics,
practical-significance verdicts, rank diagnostics between the two
protocols, robustness accounting, normalization to the platform-local
winner, the cross-platform recommendation tier, and per-platform guidance.
Raw samples are the only input; nothing here is ever read back out of a
rendered table.

Statistical policy: a reported point is mean +/- sample standard deviation
(n-1 denominator), and two points differ practically only when their means
differ by more than a protocol-specific relative threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import AnalysisError, IntegrityError
from .loader import CellFailure
from .results import (
    AdapterRecord,
    BenchmarkResult,
    CorpusSummary,
    PlatformData,
    PlatformMetadata,
    ProtocolResult,
    atomic_write_text,
    merge_platform_results,
)

SUMMARY_SCHEMA_VERSION = 1

VERDICT_FASTER = "faster"
VERDICT_SLOWER = "slower"
VERDICT_TIED = "tied"
VERDICT_UNDEFINED = "undefined"


@dataclass(frozen=True)
class StatisticalPolicy:
    """Relative thresholds below which a difference is noise, per protocol."""

    single_thread_threshold: float = 0.01
    loader_threshold: float = 0.05

    def __post_init__(self):
        for name, value in (
            ("single_thread_threshold", self.single_thread_threshold),
            ("loader_threshold", self.loader_threshold),
        ):
            if not (0.0 < value < 1.0):
                raise AnalysisError(f"{name} must be in (0, 1), got {value}")


@dataclass(frozen=True)
class TierPolicy:
    """Membership rules for the cross-platform recommendation tier."""

    normalized_floor: float = 0.90
    require_zero_skips: bool = True

    def __post_init__(self):
        if not (0.0 < self.normalized_floor <= 1.0):
            raise AnalysisError(
                f"normalized_floor must be in (0, 1], got {self.normalized_floor}"
            )


# ---------------------------------------------------------------------------
# Core operations


def mean_std(samples: Sequence[float]) -> tuple[float, float | None]:
    """Mean and sample standard deviation (n-1); std is None for n=1."""
    n = len(samples)
    if n == 0:
        raise AnalysisError("cannot summarize zero samples")
    for x in samples:
        if not math.isfinite(x):
            raise AnalysisError(f"non-finite sample {x}")
    mean = math.fsum(samples) / n
    if n == 1:
        return mean, None
    variance = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, math.sqrt(variance)


def practical_compare(
    samples_a: Sequence[float], samples_b: Sequence[float], threshold: float
) -> str:
    """Verdict for a vs b: 'faster' iff mean(a) > mean(b)*(1+threshold),
    'slower' symmetrically, else 'tied'."""
    if not (0.0 < threshold < 1.0):
        raise AnalysisError(f"threshold must be in (0, 1), got {threshold}")
    mean_a, _ = mean_std(samples_a)
    mean_b, _ = mean_std(samples_b)
    if mean_a > mean_b * (1.0 + threshold):
        return VERDICT_FASTER
    if mean_b > mean_a * (1.0 + threshold):
        return VERDICT_SLOWER
    return VERDICT_TIED


def rank_by_mean(means: Mapping[str, float]) -> dict[str, float]:
    """Rank adapters by mean, rank 1 = highest; exact ties share the
    average of the positions they span."""
    if not means:
        raise AnalysisError("no means to rank")
    for name, value in means.items():
        if not math.isfinite(value):
            raise AnalysisError(f"{name}: non-finite mean {value}")
    names = sorted(means, key=lambda n: (-means[n], n))
    ranks: dict[str, float] = {}
    i = 0
    while i < len(names):
        j = i
        while j < len(names) and means[names[j]] == means[names[i]]:
            j += 1
        average = ((i + 1) + j) / 2.0
        for k in range(i, j):
            ranks[names[k]] = average
        i = j
    return dict(sorted(ranks.items()))


def spearman_rho(ranks_a: Mapping[str, float], ranks_b: Mapping[str, float]) -> float:
    """Spearman correlation computed as Pearson over rank vectors, which
    stays correct under average-rank ties."""
    keys = sorted(ranks_a)
    if sorted(ranks_b) != keys:
        raise AnalysisError("rank maps must cover identical keys")
    if len(keys) < 2:
        raise AnalysisError("need at least two ranked adapters")
    a = [float(ranks_a[k]) for k in keys]
    b = [float(ranks_b[k]) for k in keys]
    mean_a = math.fsum(a) / len(a)
    mean_b = math.fsum(b) / len(b)
    da = [x - mean_a for x in a]
    db = [x - mean_b for x in b]
    denom = math.sqrt(math.fsum(x * x for x in da) * math.fsum(x * x for x in db))
    if denom == 0.0:
        raise AnalysisError("rank variance is zero")
    rho = math.fsum(x * y for x, y in zip(da, db)) / denom
    return max(-1.0, min(1.0, rho))


@dataclass(frozen=True)
class RankMove:
    """One adapter's position change between protocols.

    delta = single_rank - loader_rank; positive means the adapter climbs
    once worker parallelism is in play.
    """

    adapter: str
    single_rank: float
    loader_rank: float
    delta: float


def rank_moves(
    single_ranks: Mapping[str, float], loader_ranks: Mapping[str, float]
) -> list[RankMove]:
    """All moves, largest |delta| first; equal magnitudes order by name."""
    keys = sorted(single_ranks)
    if sorted(loader_ranks) != keys:
        raise AnalysisError("rank maps must cover identical keys")
    moves = [
        RankMove(
            adapter=name,
            single_rank=single_ranks[name],
            loader_rank=loader_ranks[name],
            delta=single_ranks[name] - loader_ranks[name],
        )
        for name in keys
    ]
    moves.sort(key=lambda m: (-abs(m.delta), m.adapter))
    return moves


def peak_of_sweep(sweep: Mapping[int, float]) -> tuple[int, float]:
    """(worker_count, mean) of the sweep's best cell; ties take fewer workers."""
    if not sweep:
        raise AnalysisError("empty sweep")
    best = min(sweep, key=lambda w: (-sweep[w], w))
    return best, sweep[best]


@dataclass(frozen=True)
class WorkerPeakSummary:
    """Where sweeps peak on one platform, and what the pool buys on average."""

    peak_counts: dict[int, int]
    speedups: dict[str, float]
    mean_peak_speedup: float


def worker_peak_summary(sweeps: Mapping[str, Mapping[int, float]]) -> WorkerPeakSummary:
    """Count peak locations across adapters and average peak-over-baseline
    speedup. Every sweep must include the w=0 baseline."""
    if not sweeps:
        raise AnalysisError("no sweeps to summarize")
    counts_keys = sorted({w for sweep in sweeps.values() for w in sweep})
    counts = {w: 0 for w in counts_keys}
    speedups: dict[str, float] = {}
    for adapter in sorted(sweeps):
        sweep = sweeps[adapter]
        if 0 not in sweep:
            raise AnalysisError(f"{adapter}: sweep lacks the w=0 baseline")
        baseline = sweep[0]
        if not (baseline > 0.0 and math.isfinite(baseline)):
            raise AnalysisError(f"{adapter}: invalid w=0 baseline {baseline}")
        peak_w, peak_mean = peak_of_sweep(sweep)
        counts[peak_w] += 1
        speedups[adapter] = peak_mean / baseline
    mean_speedup = math.fsum(speedups.values()) / len(speedups)
    return WorkerPeakSummary(
        peak_counts=counts, speedups=speedups, mean_peak_speedup=mean_speedup
    )


def normalize_throughput(values: Mapping[str, float]) -> dict[str, float]:
    """Divide every value by the group's maximum (the platform-local winner)."""
    if not values:
        raise AnalysisError("nothing to normalize")
    top = max(values.values())
    if not (top > 0.0 and math.isfinite(top)):
        raise AnalysisError(f"invalid maximum {top}")
    return {name: values[name] / top for name in sorted(values)}


@dataclass(frozen=True)
class LeaderGap:
    """What picking the single-thread winner costs at loader scale."""

    single_leader: str
    loader_leader: str
    single_leader_peak: float | None
    loader_leader_peak: float
    gap_pct: float | None
    verdict: str
    note: str | None = None


def leader_gap(
    single_means: Mapping[str, float],
    peak_samples: Mapping[str, tuple[float, Sequence[float]]],
    threshold: float,
) -> LeaderGap:
    """Compare the single-thread leader's loader peak against the loader
    leader's peak; gap is relative to the loader leader."""
    if not single_means or not peak_samples:
        raise AnalysisError("leader gap needs both protocols measured")
    single_leader = min(single_means, key=lambda n: (-single_means[n], n))
    loader_leader = min(peak_samples, key=lambda n: (-peak_samples[n][0], n))
    loader_peak, loader_samples = peak_samples[loader_leader]
    if single_leader not in peak_samples:
        return LeaderGap(
            single_leader=single_leader,
            loader_leader=loader_leader,
            single_leader_peak=None,
            loader_leader_peak=loader_peak,
            gap_pct=None,
            verdict=VERDICT_UNDEFINED,
            note=f"{single_leader} has no loader measurements",
        )
    single_peak, single_samples = peak_samples[single_leader]
    gap = 100.0 * (loader_peak - single_peak) / loader_peak
    verdict = practical_compare(single_samples, loader_samples, threshold)
    return LeaderGap(
        single_leader=single_leader,
        loader_leader=loader_leader,
        single_leader_peak=single_peak,
        loader_leader_peak=loader_peak,
        gap_pct=gap,
        verdict=verdict,
    )


@dataclass(frozen=True)
class SkipReport:
    """Robustness record for one adapter on one platform."""

    adapter: str
    skip_count: int
    skipped_indices: tuple[int, ...]
    reasons: dict[int, str]
    any_backend_fault: bool


def skip_report(adapter: str, cells: Sequence[ProtocolResult]) -> SkipReport:
    """Fuse skip records across every cell of one adapter, enforcing that
    all cells (both protocols, every worker count) skipped the same items."""
    if not cells:
        raise AnalysisError(f"{adapter}: no cells for skip report")
    reference = cells[0].skipped_indices
    for cell in cells[1:]:
        if cell.skipped_indices != reference:
            raise IntegrityError(
                f"{adapter}: skip sets differ across cells "
                f"({cell.protocol} w={cell.worker_count}: "
                f"{list(cell.skipped_indices)} vs {list(reference)})"
            )
    reasons = {skip.item_index: skip.reason for skip in cells[0].skips}
    fault = any(skip.backend_fault for cell in cells for skip in cell.skips)
    return SkipReport(
        adapter=adapter,
        skip_count=len(reference),
        skipped_indices=reference,
        reasons=reasons,
        any_backend_fault=fault,
    )


@dataclass(frozen=True)
class TierEntry:
    """One member of the cross-platform recommendation tier (fractions of
    the platform winner; rendering converts to percent)."""

    adapter: str
    mean_normalized: float
    min_normalized: float
    max_normalized: float


def zero_skip_tier(
    normalized_peaks: Mapping[str, Mapping[str, float]],
    skip_counts: Mapping[str, Mapping[str, int]],
    eligibility: Mapping[str, Mapping[str, bool]],
    policy: TierPolicy | None = None,
) -> list[TierEntry]:
    """Adapters that hold up everywhere: measured on every platform,
    loader-eligible everywhere, zero skips everywhere (when required), and
    never below the normalized floor. Ordered by mean normalized peak."""
    policy = policy or TierPolicy()
    if not normalized_peaks:
        raise AnalysisError("no platforms to tier over")
    labels = sorted(normalized_peaks)
    candidates = set(normalized_peaks[labels[0]])
    for label in labels[1:]:
        candidates &= set(normalized_peaks[label])
    entries = []
    for adapter in sorted(candidates):
        values = [normalized_peaks[label][adapter] for label in labels]
        if any(v < policy.normalized_floor for v in values):
            continue
        if not all(eligibility[label].get(adapter, False) for label in labels):
            continue
        if policy.require_zero_skips and any(
            skip_counts[label].get(adapter, 0) != 0 for label in labels
        ):
            continue
        entries.append(
            TierEntry(
                adapter=adapter,
                mean_normalized=math.fsum(values) / len(values),
                min_normalized=min(values),
                max_normalized=max(values),
            )
        )
    entries.sort(key=lambda e: (-e.mean_normalized, e.adapter))
    return entries


@dataclass(frozen=True)
class GuidanceEntry:
    adapter: str
    worker_count: int
    peak_mean: float


def per_platform_guidance(
    peaks: Mapping[str, tuple[int, float]],
    skip_counts: Mapping[str, int],
    eligibility: Mapping[str, bool],
    top_n: int = 3,
) -> list[GuidanceEntry]:
    """Top-N loader configurations on one platform among zero-skip,
    loader-eligible adapters."""
    candidates = [
        name
        for name in sorted(peaks)
        if eligibility.get(name, False) and skip_counts.get(name, 0) == 0
    ]
    candidates.sort(key=lambda n: (-peaks[n][1], n))
    return [
        GuidanceEntry(adapter=n, worker_count=peaks[n][0], peak_mean=peaks[n][1])
        for n in candidates[:top_n]
    ]


# ---------------------------------------------------------------------------
# Whole-summary assembly


@dataclass(frozen=True)
class CellStats:
    mean: float
    std: float | None


@dataclass(frozen=True)
class PeakCell:
    worker_count: int
    mean: float


@dataclass(frozen=True)
class RankDiagnostics:
    """Protocol-rank agreement over adapters measured under both protocols."""

    single_ranks: dict[str, float]
    loader_ranks: dict[str, float]
    spearman: float | None
    moves: tuple[RankMove, ...]


@dataclass
class PlatformAnalysis:
    label: str
    platform: PlatformMetadata
    corpus: CorpusSummary
    adapters: dict[str, AdapterRecord]
    single: dict[str, CellStats]
    sweeps: dict[str, dict[int, CellStats]]
    peaks: dict[str, PeakCell]
    skip_reports: dict[str, SkipReport]
    diagnostics: RankDiagnostics | None
    gap: LeaderGap | None
    worker_summary: WorkerPeakSummary | None
    normalized_single: dict[str, float]
    normalized_peak: dict[str, float]
    top_tier: tuple[str, ...]
    failures: tuple[CellFailure, ...]
    notes: tuple[str, ...]


@dataclass
class AnalysisSummary:
    policy: StatisticalPolicy
    tier_policy: TierPolicy
    platforms: dict[str, PlatformAnalysis]
    tier: tuple[TierEntry, ...]
    guidance: dict[str, tuple[GuidanceEntry, ...]]
    notes: tuple[str, ...]
    schema_version: int = SUMMARY_SCHEMA_VERSION


def analyze_platform(data: PlatformData, policy: StatisticalPolicy) -> PlatformAnalysis:
    notes: list[str] = []
    single_cells = data.single_cells()
    sweep_cells = data.loader_cells()

    skip_reports: dict[str, SkipReport] = {}
    for adapter in sorted(set(single_cells) | set(sweep_cells)):
        cells: list[ProtocolResult] = []
        if adapter in single_cells:
            cells.append(single_cells[adapter])
        cells.extend(
            sweep_cells.get(adapter, {})[w] for w in sorted(sweep_cells.get(adapter, {}))
        )
        skip_reports[adapter] = skip_report(adapter, cells)

    single = {
        adapter: CellStats(*mean_std(cell.samples))
        for adapter, cell in single_cells.items()
    }
    sweeps = {
        adapter: {w: CellStats(*mean_std(cell.samples)) for w, cell in sweep.items()}
        for adapter, sweep in sweep_cells.items()
    }
    peaks = {
        adapter: PeakCell(*peak_of_sweep({w: s.mean for w, s in sweep.items()}))
        for adapter, sweep in sweeps.items()
    }

    diagnostics = None
    shared = sorted(set(single) & set(peaks))
    if shared:
        single_ranks = rank_by_mean({a: single[a].mean for a in shared})
        loader_ranks = rank_by_mean({a: peaks[a].mean for a in shared})
        if len(shared) >= 2:
            rho = spearman_rho(single_ranks, loader_ranks)
        else:
            rho = None
            notes.append(
                f"{data.label}: rank correlation undefined with fewer than "
                f"two dual-protocol adapters"
            )
        diagnostics = RankDiagnostics(
            single_ranks=single_ranks,
            loader_ranks=loader_ranks,
            spearman=rho,
            moves=tuple(rank_moves(single_ranks, loader_ranks)),
        )

    gap = None
    if single and peaks:
        gap = leader_gap(
            {a: s.mean for a, s in single.items()},
            {
                a: (peaks[a].mean, sweep_cells[a][peaks[a].worker_count].samples)
                for a in peaks
            },
            policy.loader_threshold,
        )
        if gap.note:
            notes.append(f"{data.label}: {gap.note}")

    worker_summary = None
    if sweeps:
        if all(0 in sweep for sweep in sweeps.values()):
            worker_summary = worker_peak_summary(
                {a: {w: s.mean for w, s in sweep.items()} for a, sweep in sweeps.items()}
            )
        else:
            notes.append(
                f"{data.label}: worker summary omitted (some sweeps lack w=0)"
            )

    normalized_single = (
        normalize_throughput({a: s.mean for a, s in single.items()}) if single else {}
    )
    normalized_peak = (
        normalize_throughput({a: p.mean for a, p in peaks.items()}) if peaks else {}
    )

    top_tier: tuple[str, ...] = ()
    if peaks:
        leader = min(peaks, key=lambda a: (-peaks[a].mean, a))
        leader_samples = sweep_cells[leader][peaks[leader].worker_count].samples
        tied = [
            adapter
            for adapter in peaks
            if practical_compare(
                sweep_cells[adapter][peaks[adapter].worker_count].samples,
                leader_samples,
                policy.loader_threshold,
            )
            == VERDICT_TIED
        ]
        top_tier = tuple(sorted(tied, key=lambda a: (-peaks[a].mean, a)))

    return PlatformAnalysis(
        label=data.label,
        platform=data.platform,
        corpus=data.corpus_summary,
        adapters=dict(sorted(data.adapters.items())),
        single=dict(sorted(single.items())),
        sweeps={a: dict(sorted(sw.items())) for a, sw in sorted(sweeps.items())},
        peaks=dict(sorted(peaks.items())),
        skip_reports=skip_reports,
        diagnostics=diagnostics,
        gap=gap,
        worker_summary=worker_summary,
        normalized_single=normalized_single,
        normalized_peak=normalized_peak,
        top_tier=top_tier,
        failures=tuple(data.failures),
        notes=tuple(notes),
    )


def summarize(
    results: Sequence[BenchmarkResult],
    policy: StatisticalPolicy | None = None,
    tier_policy: TierPolicy | None = None,
) -> AnalysisSummary:
    """Merge raw results and derive every reported quantity."""
    policy = policy or StatisticalPolicy()
    tier_policy = tier_policy or TierPolicy()
    matrix = merge_platform_results(results)

    platforms = {
        label: analyze_platform(matrix.platforms[label], policy)
        for label in matrix.labels()
    }

    notes: list[str] = []
    for analysis in platforms.values():
        notes.extend(analysis.notes)
    if len(platforms) == 1:
        notes.append(
            "single-platform summary: tier min/mean/max coincide by construction"
        )

    with_loader = {
        label: analysis
        for label, analysis in platforms.items()
        if analysis.normalized_peak
    }
    tier: list[TierEntry] = []
    if with_loader:
        tier = zero_skip_tier(
            {label: a.normalized_peak for label, a in with_loader.items()},
            {
                label: {r.adapter: r.skip_count for r in a.skip_reports.values()}
                for label, a in with_loader.items()
            },
            {
                label: {rec.name: rec.loader_eligible for rec in a.adapters.values()}
                for label, a in with_loader.items()
            },
            tier_policy,
        )
    else:
        notes.append("no loader measurements anywhere: tier and guidance empty")

    guidance = {
        label: tuple(
            per_platform_guidance(
                {a: (p.worker_count, p.mean) for a, p in analysis.peaks.items()},
                {r.adapter: r.skip_count for r in analysis.skip_reports.values()},
                {rec.name: rec.loader_eligible for rec in analysis.adapters.values()},
            )
        )
        for label, analysis in with_loader.items()
    }

    return AnalysisSummary(
        policy=policy,
        tier_policy=tier_policy,
        platforms=platforms,
        tier=tuple(tier),
        guidance=guidance,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Summary (de)serialization


def _stats_doc(stats: CellStats) -> dict:
    return {"mean": stats.mean, "std": stats.std}


def _diagnostics_doc(diag: RankDiagnostics | None) -> dict | None:
    if diag is None:
        return None
    return {
        "single_ranks": diag.single_ranks,
        "loader_ranks": diag.loader_ranks,
        "spearman": diag.spearman,
        "moves": [asdict(m) for m in diag.moves],
    }


def _platform_doc(analysis: PlatformAnalysis) -> dict:
    return {
        "label": analysis.label,
        "platform": asdict(analysis.platform),
        "corpus": asdict(analysis.corpus),
        "adapters": {name: asdict(r) for name, r in analysis.adapters.items()},
        "single": {a: _stats_doc(s) for a, s in analysis.single.items()},
        "sweeps": {
            a: {str(w): _stats_doc(s) for w, s in sweep.items()}
            for a, sweep in analysis.sweeps.items()
        },
        "peaks": {a: asdict(p) for a, p in analysis.peaks.items()},
        "skip_reports": {
            a: {
                "adapter": r.adapter,
                "skip_count": r.skip_count,
                "skipped_indices": list(r.skipped_indices),
                "reasons": {str(i): reason for i, reason in r.reasons.items()},
                "any_backend_fault": r.any_backend_fault,
            }
            for a, r in analysis.skip_reports.items()
        },
        "diagnostics": _diagnostics_doc(analysis.diagnostics),
        "gap": asdict(analysis.gap) if analysis.gap else None,
        "worker_summary": (
            {
                "peak_counts": {
                    str(w): c for w, c in analysis.worker_summary.peak_counts.items()
                },
                "speedups": analysis.worker_summary.speedups,
                "mean_peak_speedup": analysis.worker_summary.mean_peak_speedup,
            }
            if analysis.worker_summary
            else None
        ),
        "normalized_single": analysis.normalized_single,
        "normalized_peak": analysis.normalized_peak,
        "top_tier": list(analysis.top_tier),
        "failures": [asdict(f) for f in analysis.failures],
        "notes": list(analysis.notes),
    }


def summary_to_doc(summary: AnalysisSummary) -> dict:
    return {
        "schema_version": summary.schema_version,
        "policy": asdict(summary.policy),
        "tier_policy": asdict(summary.tier_policy),
        "platforms": {
            label: _platform_doc(a) for label, a in summary.platforms.items()
        },
        "tier": [asdict(e) for e in summary.tier],
        "guidance": {
            label: [asdict(e) for e in entries]
            for label, entries in summary.guidance.items()
        },
        "notes": list(summary.notes),
    }


def _stats_from(doc: dict) -> CellStats:
    return CellStats(mean=doc["mean"], std=doc["std"])


def _platform_from(doc: dict) -> PlatformAnalysis:
    diag = None
    if doc["diagnostics"] is not None:
        d = doc["diagnostics"]
        diag = RankDiagnostics(
            single_ranks=d["single_ranks"],
            loader_ranks=d["loader_ranks"],
            spearman=d["spearman"],
            moves=tuple(RankMove(**m) for m in d["moves"]),
        )
    worker = None
    if doc["worker_summary"] is not None:
        w = doc["worker_summary"]
        worker = WorkerPeakSummary(
            peak_counts={int(k): v for k, v in w["peak_counts"].items()},
            speedups=w["speedups"],
            mean_peak_speedup=w["mean_peak_speedup"],
        )
    return PlatformAnalysis(
        label=doc["label"],
        platform=PlatformMetadata(**doc["platform"]),
        corpus=CorpusSummary(**doc["corpus"]),
        adapters={n: AdapterRecord(**r) for n, r in doc["adapters"].items()},
        single={a: _stats_from(s) for a, s in doc["single"].items()},
        sweeps={
            a: {int(w): _stats_from(s) for w, s in sweep.items()}
            for a, sweep in doc["sweeps"].items()
        },
        peaks={a: PeakCell(**p) for a, p in doc["peaks"].items()},
        skip_reports={
            a: SkipReport(
                adapter=r["adapter"],
                skip_count=r["skip_count"],
                skipped_indices=tuple(r["skipped_indices"]),
                reasons={int(i): reason for i, reason in r["reasons"].items()},
                any_backend_fault=r["any_backend_fault"],
            )
            for a, r in doc["skip_reports"].items()
        },
        diagnostics=diag,
        gap=LeaderGap(**doc["gap"]) if doc["gap"] else None,
        worker_summary=worker,
        normalized_single=doc["normalized_single"],
        normalized_peak=doc["normalized_peak"],
        top_tier=tuple(doc["top_tier"]),
        failures=tuple(CellFailure(**f) for f in doc["failures"]),
        notes=tuple(doc["notes"]),
    )


def summary_from_doc(doc: dict) -> AnalysisSummary:
    version = doc.get("schema_version")
    if version != SUMMARY_SCHEMA_VERSION:
        raise AnalysisError(f"unsupported summary schema_version {version!r}")
    return AnalysisSummary(
        policy=StatisticalPolicy(**doc["policy"]),
        tier_policy=TierPolicy(**doc["tier_policy"]),
        platforms={
            label: _platform_from(p) for label, p in doc["platforms"].items()
        },
        tier=tuple(TierEntry(**e) for e in doc["tier"]),
        guidance={
            label: tuple(GuidanceEntry(**e) for e in entries)
            for label, entries in doc["guidance"].items()
        },
        notes=tuple(doc["notes"]),
        schema_version=version,
    )


def write_summary(summary: AnalysisSummary, path: str | Path) -> Path:
    path = Path(path)
    text = json.dumps(summary_to_doc(summary), sort_keys=True, indent=2) + "\n"
    atomic_write_text(path, text)
    return path


def read_summary(path: str | Path) -> AnalysisSummary:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise AnalysisError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise AnalysisError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return summary_from_doc(doc)
    except (KeyError, TypeError) as exc:
        raise AnalysisError(f"{path}: malformed summary: {exc}") from exc
