"""Statistics, ranking, and cross-platform aggregation.

The numerical functions are checked against independent oracles: numpy for
moments, the closed-form rank-difference formula for correlation on tie-free
data, and a from-scratch Pearson implementation for tied data.
"""

import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jpegbench.adapters import Skip
from jpegbench.analysis import (
    AnalysisError,
    GuidanceEntry,
    StatisticalPolicy,
    TierPolicy,
    leader_gap,
    mean_std,
    normalize_throughput,
    peak_of_sweep,
    per_platform_guidance,
    practical_compare,
    rank_by_mean,
    rank_moves,
    read_summary,
    skip_report,
    spearman_rho,
    summarize,
    summary_from_doc,
    summary_to_doc,
    worker_peak_summary,
    write_summary,
    zero_skip_tier,
)
from jpegbench.errors import IntegrityError
from jpegbench.single_thread import ProtocolResult


def closed_form_rho(order_a, order_b):
    """1 - 6*sum(d^2) / (n(n^2-1)); valid only without ties."""
    n = len(order_a)
    d2 = sum((a - b) ** 2 for a, b in zip(order_a, order_b))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


# ---------------------------------------------------------------------------
# mean / std


@given(
    st.lists(
        st.floats(min_value=1e-3, max_value=1e6, allow_nan=False),
        min_size=2,
        max_size=40,
    )
)
@settings(max_examples=300, deadline=None)
def test_mean_std_matches_numpy(samples):
    mean, std = mean_std(samples)
    assert mean == pytest.approx(float(np.mean(samples)), rel=1e-12)
    assert std == pytest.approx(float(np.std(samples, ddof=1)), rel=1e-9, abs=1e-12)


def test_mean_std_single_sample_has_no_std():
    assert mean_std([42.0]) == (42.0, None)


def test_mean_std_rejects_empty():
    with pytest.raises(AnalysisError, match="zero samples"):
        mean_std([])


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
def test_mean_std_rejects_non_finite(bad):
    with pytest.raises(AnalysisError, match="non-finite"):
        mean_std([1.0, bad])


def test_exact_symmetric_samples():
    # m-s, m, m+s has mean m and sample std s with no rounding slack.
    mean, std = mean_std([90.0, 100.0, 110.0])
    assert mean == 100.0
    assert std == 10.0


# ---------------------------------------------------------------------------
# practical comparison


def test_compare_boundary_is_exclusive():
    # 1.5 and 150.0 are exact binary floats, so the boundary itself is
    # representable: equality must read as tied, strictly above as faster.
    assert practical_compare([150.0], [100.0], 0.5) == "tied"
    assert practical_compare([150.1], [100.0], 0.5) == "faster"
    assert practical_compare([100.0], [150.1], 0.5) == "slower"


def test_compare_uses_means_not_extremes():
    # Sample spreads differ wildly but the means sit within one percent.
    assert practical_compare([10.0, 28.6], [19.0, 19.5], 0.01) == "tied"


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.2, 2.0])
def test_compare_rejects_bad_threshold(threshold):
    with pytest.raises(AnalysisError, match="threshold"):
        practical_compare([1.0], [1.0], threshold)


# ---------------------------------------------------------------------------
# ranking


def test_rank_by_mean_highest_is_rank_one():
    ranks = rank_by_mean({"a": 5.0, "b": 9.0, "c": 1.0})
    assert ranks == {"a": 2.0, "b": 1.0, "c": 3.0}


def test_rank_by_mean_averages_ties():
    ranks = rank_by_mean({"a": 9.0, "b": 9.0, "c": 1.0, "d": 0.5})
    assert ranks == {"a": 1.5, "b": 1.5, "c": 3.0, "d": 4.0}


def test_rank_by_mean_three_way_tie():
    ranks = rank_by_mean({"a": 2.0, "b": 2.0, "c": 2.0, "d": 7.0})
    assert ranks == {"a": 3.0, "b": 3.0, "c": 3.0, "d": 1.0}


def test_rank_by_mean_rejects_empty_and_non_finite():
    with pytest.raises(AnalysisError):
        rank_by_mean({})
    with pytest.raises(AnalysisError, match="non-finite"):
        rank_by_mean({"a": float("nan")})


# ---------------------------------------------------------------------------
# Spearman correlation


def test_spearman_known_value():
    a = rank_by_mean({"w": 40.0, "x": 30.0, "y": 20.0, "z": 10.0})
    b = rank_by_mean({"w": 30.0, "x": 40.0, "y": 10.0, "z": 20.0})
    # d = (1,1,1,1) so rho = 1 - 6*4/(4*15) = 0.6 exactly
    assert spearman_rho(a, b) == pytest.approx(0.6, abs=1e-15)


@given(st.permutations(list(range(8))))
@settings(max_examples=300, deadline=None)
def test_spearman_matches_closed_form_without_ties(perm):
    n = len(perm)
    names = [f"a{i}" for i in range(n)]
    ranks_a = {name: float(i + 1) for i, name in enumerate(names)}
    ranks_b = {name: float(perm[i] + 1) for i, name in enumerate(names)}
    expected = closed_form_rho(list(range(1, n + 1)), [p + 1 for p in perm])
    assert spearman_rho(ranks_a, ranks_b) == pytest.approx(expected, abs=1e-12)


def test_spearman_with_ties_matches_pearson_on_ranks():
    means_a = {"a": 9.0, "b": 9.0, "c": 5.0, "d": 2.0, "e": 2.0}
    means_b = {"a": 7.0, "b": 3.0, "c": 3.0, "d": 3.0, "e": 1.0}
    ra = rank_by_mean(means_a)
    rb = rank_by_mean(means_b)
    keys = sorted(ra)
    expected = pearson([ra[k] for k in keys], [rb[k] for k in keys])
    assert spearman_rho(ra, rb) == pytest.approx(expected, abs=1e-12)


def test_spearman_perfect_agreement_and_reversal():
    a = {"x": 1.0, "y": 2.0, "z": 3.0}
    assert spearman_rho(a, a) == 1.0
    assert spearman_rho(a, {"x": 3.0, "y": 2.0, "z": 1.0}) == -1.0


def test_spearman_input_validation():
    with pytest.raises(AnalysisError, match="identical keys"):
        spearman_rho({"a": 1.0, "b": 2.0}, {"a": 1.0, "c": 2.0})
    with pytest.raises(AnalysisError, match="at least two"):
        spearman_rho({"a": 1.0}, {"a": 1.0})
    with pytest.raises(AnalysisError, match="variance"):
        spearman_rho({"a": 1.5, "b": 1.5}, {"a": 1.0, "b": 2.0})


@given(
    st.lists(st.floats(min_value=0.1, max_value=1e5), min_size=2, max_size=10, unique=True),
    st.data(),
)
@settings(max_examples=200, deadline=None)
def test_spearman_bounded_and_symmetric(means, data):
    names = [f"n{i}" for i in range(len(means))]
    a = rank_by_mean(dict(zip(names, means)))
    shuffled = data.draw(st.permutations(means))
    b = rank_by_mean(dict(zip(names, shuffled)))
    rho = spearman_rho(a, b)
    assert -1.0 <= rho <= 1.0
    assert spearman_rho(b, a) == pytest.approx(rho, abs=1e-12)


# ---------------------------------------------------------------------------
# rank moves


def test_rank_moves_sign_convention():
    single = {"climber": 10.0, "faller": 1.0}
    loader = {"climber": 1.0, "faller": 10.0}
    moves = rank_moves(single, loader)
    by_name = {m.adapter: m for m in moves}
    assert by_name["climber"].delta == 9.0
    assert by_name["faller"].delta == -9.0


def test_rank_moves_order_big_first_then_name():
    single = {"a": 4.0, "b": 1.0, "c": 2.0, "d": 3.0}
    loader = {"a": 1.0, "b": 4.0, "c": 2.0, "d": 3.0}
    moves = rank_moves(single, loader)
    assert [(m.adapter, m.delta) for m in moves] == [
        ("a", 3.0),
        ("b", -3.0),
        ("c", 0.0),
        ("d", 0.0),
    ]


def test_rank_moves_requires_same_keys():
    with pytest.raises(AnalysisError, match="identical keys"):
        rank_moves({"a": 1.0}, {"b": 1.0})


@given(st.permutations(list(range(7))))
@settings(max_examples=150, deadline=None)
def test_rank_move_deltas_sum_to_zero(perm):
    names = [f"a{i}" for i in range(len(perm))]
    single = {name: float(i + 1) for i, name in enumerate(names)}
    loader = {name: float(perm[i] + 1) for i, name in enumerate(names)}
    moves = rank_moves(single, loader)
    assert math.fsum(m.delta for m in moves) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# sweeps and peaks


def test_peak_of_sweep_prefers_fewer_workers_on_tie():
    assert peak_of_sweep({0: 10.0, 4: 25.0, 8: 25.0}) == (4, 25.0)


def test_peak_of_sweep_rejects_empty():
    with pytest.raises(AnalysisError, match="empty sweep"):
        peak_of_sweep({})


def test_worker_peak_summary_counts_and_speedups():
    sweeps = {
        "fast": {0: 100.0, 4: 300.0, 8: 400.0},
        "flat": {0: 100.0, 4: 110.0, 8: 90.0},
    }
    summary = worker_peak_summary(sweeps)
    assert summary.peak_counts == {0: 0, 4: 1, 8: 1}
    assert summary.speedups == {"fast": 4.0, "flat": 1.1}
    assert summary.mean_peak_speedup == pytest.approx(2.55)


def test_worker_peak_summary_requires_baseline():
    with pytest.raises(AnalysisError, match="w=0 baseline"):
        worker_peak_summary({"a": {2: 5.0, 4: 6.0}})
    with pytest.raises(AnalysisError, match="invalid w=0 baseline"):
        worker_peak_summary({"a": {0: 0.0, 4: 6.0}})


def test_normalize_throughput():
    normalized = normalize_throughput({"a": 50.0, "b": 200.0, "c": 100.0})
    assert normalized == {"a": 0.25, "b": 1.0, "c": 0.5}
    with pytest.raises(AnalysisError):
        normalize_throughput({})
    with pytest.raises(AnalysisError, match="invalid maximum"):
        normalize_throughput({"a": -3.0, "b": -5.0})


# ---------------------------------------------------------------------------
# leader gap


def test_leader_gap_when_leaders_differ():
    gap = leader_gap(
        single_means={"a": 10.0, "b": 9.0},
        peak_samples={"a": (50.0, [49.0, 50.0, 51.0]), "b": (100.0, [99.0, 100.0, 101.0])},
        threshold=0.05,
    )
    assert gap.single_leader == "a"
    assert gap.loader_leader == "b"
    assert gap.gap_pct == pytest.approx(50.0)
    assert gap.verdict == "slower"
    assert gap.note is None


def test_leader_gap_same_leader_is_zero_and_tied():
    gap = leader_gap(
        single_means={"a": 10.0, "b": 9.0},
        peak_samples={"a": (100.0, [100.0] * 3), "b": (60.0, [60.0] * 3)},
        threshold=0.05,
    )
    assert gap.single_leader == gap.loader_leader == "a"
    assert gap.gap_pct == 0.0
    assert gap.verdict == "tied"


def test_leader_gap_single_leader_missing_from_loader():
    gap = leader_gap(
        single_means={"solo": 10.0, "b": 9.0},
        peak_samples={"b": (60.0, [60.0] * 3)},
        threshold=0.05,
    )
    assert gap.verdict == "undefined"
    assert gap.gap_pct is None
    assert gap.single_leader_peak is None
    assert "no loader measurements" in gap.note


def test_leader_gap_ties_break_by_name():
    gap = leader_gap(
        single_means={"b": 10.0, "a": 10.0},
        peak_samples={"a": (60.0, [60.0] * 3), "b": (60.0, [60.0] * 3)},
        threshold=0.05,
    )
    assert gap.single_leader == "a"
    assert gap.loader_leader == "a"


def test_leader_gap_requires_both_protocols():
    with pytest.raises(AnalysisError, match="both protocols"):
        leader_gap({}, {"a": (1.0, [1.0])}, 0.05)


# ---------------------------------------------------------------------------
# skip fusion


def make_cell(adapter, protocol, workers, *, corpus_size=10, skip_indices=(), fault=False):
    decoded = corpus_size - len(skip_indices)
    wall = decoded / 5.0
    skips = tuple(
        Skip(reason="unsupported rare JPEG variant", item_index=i, backend_fault=fault)
        for i in sorted(skip_indices)
    )
    return ProtocolResult(
        adapter_name=adapter,
        protocol=protocol,
        worker_count=workers,
        batch_size=None if protocol == "single_thread" else 32,
        repetitions=1,
        warmup_passes=0,
        corpus_size=corpus_size,
        decoded_count=decoded,
        wall_times=(wall,),
        samples=(decoded / wall,),
        skips=skips,
    )


def test_skip_report_fuses_consistent_cells():
    cells = [
        make_cell("x", "single_thread", -1, skip_indices=(3, 7)),
        make_cell("x", "loader", 0, skip_indices=(3, 7)),
        make_cell("x", "loader", 4, skip_indices=(3, 7)),
    ]
    report = skip_report("x", cells)
    assert report.skip_count == 2
    assert report.skipped_indices == (3, 7)
    assert report.reasons == {3: "unsupported rare JPEG variant", 7: "unsupported rare JPEG variant"}
    assert not report.any_backend_fault


def test_skip_report_flags_backend_faults():
    cells = [make_cell("x", "loader", 2, skip_indices=(1,), fault=True)]
    assert skip_report("x", cells).any_backend_fault


def test_skip_report_rejects_divergent_cells():
    cells = [
        make_cell("x", "single_thread", -1, skip_indices=(3,)),
        make_cell("x", "loader", 0, skip_indices=(4,)),
    ]
    with pytest.raises(IntegrityError, match="skip sets differ across cells"):
        skip_report("x", cells)


def test_skip_report_needs_cells():
    with pytest.raises(AnalysisError, match="no cells"):
        skip_report("x", [])


# ---------------------------------------------------------------------------
# tier and guidance


TIER_PEAKS = {
    "p1": {"a": 1.0, "b": 0.95, "c": 0.92, "d": 0.99},
    "p2": {"a": 0.93, "b": 1.0, "c": 0.80, "d": 0.97},
}
TIER_SKIPS = {
    "p1": {"a": 0, "b": 0, "c": 0, "d": 2},
    "p2": {"a": 0, "b": 0, "c": 0, "d": 2},
}
TIER_ELIGIBLE = {
    "p1": {"a": True, "b": True, "c": True, "d": True},
    "p2": {"a": True, "b": True, "c": True, "d": True},
}


def test_tier_filters_floor_and_skips():
    tier = zero_skip_tier(TIER_PEAKS, TIER_SKIPS, TIER_ELIGIBLE)
    # c dips to 0.80 on p2 (floor), d skips twice; a and b survive.
    assert [e.adapter for e in tier] == ["b", "a"]
    a = next(e for e in tier if e.adapter == "a")
    assert a.mean_normalized == pytest.approx(0.965)
    assert a.min_normalized == 0.93
    assert a.max_normalized == 1.0


def test_tier_skippers_admitted_when_policy_relaxes():
    tier = zero_skip_tier(
        TIER_PEAKS,
        TIER_SKIPS,
        TIER_ELIGIBLE,
        TierPolicy(require_zero_skips=False),
    )
    # d: mean .98, b: mean .975, a: mean .965
    assert [e.adapter for e in tier] == ["d", "b", "a"]


def test_tier_requires_presence_on_every_platform():
    peaks = {"p1": {"a": 1.0, "b": 0.99}, "p2": {"a": 1.0}}
    tier = zero_skip_tier(peaks, {"p1": {}, "p2": {}}, {
        "p1": {"a": True, "b": True},
        "p2": {"a": True},
    })
    assert [e.adapter for e in tier] == ["a"]


def test_tier_drops_ineligible_anywhere():
    eligibility = {
        "p1": {"a": True, "b": True, "c": True, "d": True},
        "p2": {"a": True, "b": False, "c": True, "d": True},
    }
    tier = zero_skip_tier(TIER_PEAKS, TIER_SKIPS, eligibility)
    assert [e.adapter for e in tier] == ["a"]


def test_tier_floor_validation():
    with pytest.raises(AnalysisError, match="normalized_floor"):
        TierPolicy(normalized_floor=0.0)
    with pytest.raises(AnalysisError, match="no platforms"):
        zero_skip_tier({}, {}, {})


def test_guidance_orders_and_truncates():
    peaks = {
        "a": (8, 500.0),
        "b": (4, 700.0),
        "c": (8, 600.0),
        "d": (8, 900.0),
        "e": (2, 800.0),
    }
    skips = {"a": 0, "b": 0, "c": 0, "d": 1, "e": 0}
    eligible = {"a": True, "b": True, "c": True, "d": True, "e": False}
    guidance = per_platform_guidance(peaks, skips, eligible)
    assert guidance == [
        GuidanceEntry("b", 4, 700.0),
        GuidanceEntry("c", 8, 600.0),
        GuidanceEntry("a", 8, 500.0),
    ]


def test_guidance_empty_when_nobody_qualifies():
    assert per_platform_guidance({"a": (8, 1.0)}, {"a": 3}, {"a": True}) == []


# ---------------------------------------------------------------------------
# policies


def test_statistical_policy_validation():
    with pytest.raises(AnalysisError):
        StatisticalPolicy(single_thread_threshold=0.0)
    with pytest.raises(AnalysisError):
        StatisticalPolicy(loader_threshold=1.0)
    policy = StatisticalPolicy()
    assert policy.single_thread_threshold == 0.01
    assert policy.loader_threshold == 0.05


# ---------------------------------------------------------------------------
# five-platform summary: published aggregates


LABELS = [
    "amd-zen4",
    "amd-zen5",
    "arm-neoverse-n1",
    "arm-neoverse-v2",
    "intel-emerald-rapids",
]


def test_summary_covers_all_platforms(fivecpu_summary):
    assert sorted(fivecpu_summary.platforms) == LABELS


def test_summary_tier_members_and_spread(fivecpu_summary):
    tier = fivecpu_summary.tier
    assert [e.adapter for e in tier] == ["torchvision", "simplejpeg", "opencv"]
    as_pct = [
        (
            round(e.mean_normalized * 100, 1),
            round(e.min_normalized * 100, 1),
            round(e.max_normalized * 100, 1),
        )
        for e in tier
    ]
    assert as_pct == [
        (97.7, 91.9, 100.0),
        (96.7, 93.8, 100.0),
        (94.1, 91.1, 97.3),
    ]


def test_summary_rank_correlations(fivecpu_summary):
    rhos = {
        label: round(analysis.diagnostics.spearman, 2)
        for label, analysis in fivecpu_summary.platforms.items()
    }
    assert rhos == {
        "intel-emerald-rapids": 0.69,
        "amd-zen4": 0.48,
        "amd-zen5": 0.44,
        "arm-neoverse-v2": 0.01,
        "arm-neoverse-n1": 0.26,
    }


def test_summary_leader_gaps(fivecpu_summary):
    gaps = {
        label: (round(a.gap.gap_pct, 1), a.gap.verdict)
        for label, a in fivecpu_summary.platforms.items()
    }
    assert gaps == {
        "intel-emerald-rapids": (0.0, "tied"),
        "amd-zen4": (4.7, "tied"),
        "amd-zen5": (0.0, "tied"),
        "arm-neoverse-v2": (5.5, "slower"),
        "arm-neoverse-n1": (7.4, "slower"),
    }


def test_summary_largest_rank_moves(fivecpu_summary):
    largest = {
        label: analysis.diagnostics.moves[0]
        for label, analysis in fivecpu_summary.platforms.items()
    }
    expected = {
        "intel-emerald-rapids": ("imageio", 10.0, 6.0),
        "amd-zen4": ("ajpegli", 11.0, 5.0),
        "amd-zen5": ("ajpegli", 11.0, 2.0),
        "arm-neoverse-v2": ("imagecodecs", 2.0, 10.0),
        "arm-neoverse-n1": ("ajpegli", 11.0, 4.0),
    }
    for label, (name, single_rank, loader_rank) in expected.items():
        move = largest[label]
        assert (move.adapter, move.single_rank, move.loader_rank) == (
            name,
            single_rank,
            loader_rank,
        )


def test_summary_worker_peaks_and_speedups(fivecpu_summary):
    picture = {
        label: (
            {w: c for w, c in a.worker_summary.peak_counts.items() if c},
            round(a.worker_summary.mean_peak_speedup, 2),
        )
        for label, a in fivecpu_summary.platforms.items()
    }
    assert picture == {
        "intel-emerald-rapids": ({4: 1, 8: 10}, 2.75),
        "amd-zen4": ({4: 8, 8: 3}, 2.51),
        "amd-zen5": ({8: 11}, 3.64),
        "arm-neoverse-v2": ({8: 11}, 4.28),
        "arm-neoverse-n1": ({4: 1, 8: 10}, 3.73),
    }


def test_summary_peak_counts_are_zero_filled(fivecpu_summary):
    for analysis in fivecpu_summary.platforms.values():
        assert set(analysis.worker_summary.peak_counts) == {0, 2, 4, 8}


def test_summary_strict_adapters_share_one_skip(fivecpu_summary):
    strict = {"ajpegli", "jpeg4py", "kornia-rs", "turbojpeg"}
    for analysis in fivecpu_summary.platforms.values():
        for adapter, report in analysis.skip_reports.items():
            if adapter in strict:
                assert report.skipped_indices == (19876,)
                assert not report.any_backend_fault
            else:
                assert report.skip_count == 0


def test_summary_guidance_comes_from_raw_sweeps(fivecpu_summary, matrix_doc):
    # Reconstruct each platform's expected top three from the raw document:
    # zero-skip, loader-eligible adapters ordered by peak sweep mean.
    strict = set(matrix_doc["strict_skip"]["adapters"])
    eligible = {
        name
        for name, record in matrix_doc["adapters"].items()
        if record["eligibility_reason"] == "eligible"
    }
    for label, analysis in fivecpu_summary.platforms.items():
        sweeps = matrix_doc["platforms"][label]["sweeps"]
        qualified = {
            name: max(means.values())
            for name, means in sweeps.items()
            if name in eligible and name not in strict
        }
        expected = sorted(qualified, key=lambda n: (-qualified[n], n))[:3]
        got = [entry.adapter for entry in fivecpu_summary.guidance[label]]
        assert got == expected, label


def test_summary_v2_top_tier_pairs_imageio_with_torchvision(fivecpu_summary):
    assert fivecpu_summary.platforms["arm-neoverse-v2"].top_tier == (
        "imageio",
        "torchvision",
    )


def test_summary_notes_empty_for_full_matrix(fivecpu_summary):
    assert fivecpu_summary.notes == ()


def test_summary_single_platform_note(fivecpu_results):
    one = summarize([fivecpu_results[0]])
    assert any("single-platform" in note for note in one.notes)


def test_summary_without_loader_disables_tier(fivecpu_results):
    result = fivecpu_results[0]
    singles_only = dataclasses.replace(
        result,
        cells=tuple(c for c in result.cells if c.protocol == "single_thread"),
        failures=(),
    )
    summary = summarize([singles_only])
    assert summary.tier == ()
    assert summary.guidance == {}
    assert any("no loader measurements" in note for note in summary.notes)
    analysis = summary.platforms[result.platform_label]
    assert analysis.diagnostics is None
    assert analysis.gap is None
    assert analysis.worker_summary is None


# ---------------------------------------------------------------------------
# summary round trip


def test_summary_doc_round_trip(fivecpu_summary):
    doc = summary_to_doc(fivecpu_summary)
    clone = summary_from_doc(json.loads(json.dumps(doc)))
    assert clone == fivecpu_summary


def test_summary_file_round_trip(tmp_path, fivecpu_summary):
    path = write_summary(fivecpu_summary, tmp_path / "summary.json")
    assert read_summary(path) == fivecpu_summary
    assert path.read_text().endswith("\n")


# ---------------------------------------------------------------------------
# invariance under rescaling


@given(st.floats(min_value=0.25, max_value=8.0))
@settings(max_examples=30, deadline=None)
def test_ranks_and_rho_scale_invariant(factor):
    means_single = {"a": 400.0, "b": 310.0, "c": 120.0, "d": 95.0}
    means_loader = {"a": 900.0, "b": 1400.0, "c": 700.0, "d": 100.0}
    base_s = rank_by_mean(means_single)
    base_l = rank_by_mean(means_loader)
    scaled_s = rank_by_mean({k: v * factor for k, v in means_single.items()})
    scaled_l = rank_by_mean({k: v * factor for k, v in means_loader.items()})
    assert scaled_s == base_s
    assert scaled_l == base_l
    assert spearman_rho(scaled_s, scaled_l) == pytest.approx(
        spearman_rho(base_s, base_l), abs=1e-12
    )
