"""Command-line flows and exit codes.

Synthetic registries keep most flows fast; one flow runs a real backend
end to end over a disk corpus.
"""

import json

import pytest

from jpegbench.adapters import AdapterRegistry
from jpegbench.cli import main
from jpegbench.fixtures import make_descriptor, make_sleep_decode, make_strict_decode
from jpegbench.results import read_result


def _missing_backend():
    raise ImportError("no module named nope")


def synthetic_registry():
    registry = AdapterRegistry()
    registry.register(make_descriptor("sleepy"), make_sleep_decode(0.0))
    registry.register(
        make_descriptor("picky", eligibility_reason="not_process_safe"),
        make_strict_decode(marker=b"\xff\xd8"),
    )
    registry.register_lazy(
        "nope",
        "eligible",
        _missing_backend,
        strictness_note="rejects unusual streams",
    )
    return registry


# ---------------------------------------------------------------------------
# list-adapters


def test_list_adapters_shows_state_and_eligibility(capsys):
    code = main(["list-adapters"], registry=synthetic_registry())
    assert code == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 3
    by_name = {line.split()[0]: line for line in lines}
    assert "available (synthetic)" in by_name["sleepy"]
    assert "loader-eligible" in by_name["sleepy"]
    assert "unavailable: ImportError: no module named nope" in by_name["nope"]
    assert "[rejects unusual streams]" in by_name["nope"]
    assert "not_process_safe" in by_name["picky"]
    assert "available (synthetic)" in by_name["picky"]


# ---------------------------------------------------------------------------
# run


def run_args(corpus_dir, outdir, **overrides):
    args = {
        "--adapters": "sleepy",
        "--workers": "0,2",
        "--repetitions": "2",
        "--warmup": "1",
        "--output": str(outdir),
    }
    args.update(overrides)
    flat = ["run", "--corpus", str(corpus_dir)]
    for key, value in args.items():
        flat.extend([key, value])
    return flat


def single_result_file(outdir):
    files = list(outdir.rglob("*.result"))
    assert len(files) == 1
    return files[0]


def test_run_writes_one_result_tree(tmp_path, corpus_dir, capsys):
    outdir = tmp_path / "out"
    code = main(run_args(corpus_dir, outdir), registry=synthetic_registry())
    assert code == 0
    out = capsys.readouterr().out
    assert "corpus: 20 items" in out
    assert "sleepy: single_thread done" in out
    assert "sleepy: loader done (w=0,2)" in out

    result = read_result(single_result_file(outdir))
    kinds = sorted((c.protocol, c.worker_count) for c in result.cells)
    assert kinds == [("loader", 0), ("loader", 2), ("single_thread", -1)]
    assert result.failures == ()
    assert result.run_config["worker_counts"] == [0, 2]
    assert result.run_config["repetitions"] == 2
    assert result.run_config["clock"] == "perf_counter"
    assert [r.name for r in result.adapters] == ["sleepy"]


def test_run_label_override_and_limit(tmp_path, corpus_dir):
    outdir = tmp_path / "out"
    code = main(
        run_args(corpus_dir, outdir, **{"--label": "testbox", "--limit": "5"}),
        registry=synthetic_registry(),
    )
    assert code == 0
    path = single_result_file(outdir)
    assert path.parent.name == "testbox"
    result = read_result(path)
    assert result.corpus_summary.item_count == 5


def test_run_skips_unavailable_and_ineligible(tmp_path, corpus_dir, capsys):
    outdir = tmp_path / "out"
    code = main(
        run_args(corpus_dir, outdir, **{"--adapters": "sleepy,nope,picky"}),
        registry=synthetic_registry(),
    )
    out = capsys.readouterr().out
    assert "nope: unavailable" in out
    assert "picky: loader protocol skipped (not_process_safe)" in out
    # picky rejects every real JPEG, so its single-thread pass fails and the
    # exit code reports a partial run.
    assert code == 1
    result = read_result(single_result_file(outdir))
    assert [f.adapter_name for f in result.failures] == ["picky"]
    assert "all_skipped" in result.failures[0].error
    assert {c.adapter_name for c in result.cells} == {"sleepy"}


def test_run_with_no_measurable_cell_fails(tmp_path, corpus_dir, capsys):
    outdir = tmp_path / "out"
    code = main(
        run_args(corpus_dir, outdir, **{"--adapters": "picky", "--protocols": "single_thread"}),
        registry=synthetic_registry(),
    )
    assert code == 1
    assert "no cell produced a measurement" in capsys.readouterr().err


@pytest.mark.parametrize(
    "overrides",
    [
        {"--adapters": "unknown-backend"},
        {"--workers": "2,0"},
        {"--workers": "abc"},
        {"--workers": ""},
        {"--protocols": "tcp"},
        {"--repetitions": "0"},
    ],
)
def test_run_usage_errors_exit_2(tmp_path, corpus_dir, overrides, capsys):
    code = main(
        run_args(corpus_dir, tmp_path / "out", **overrides),
        registry=synthetic_registry(),
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_run_missing_corpus_exits_2(tmp_path, capsys):
    code = main(
        run_args(tmp_path / "absent", tmp_path / "out"),
        registry=synthetic_registry(),
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# analyze and report


@pytest.fixture()
def result_tree(tmp_path, corpus_dir):
    outdir = tmp_path / "results"
    code = main(run_args(corpus_dir, outdir), registry=synthetic_registry())
    assert code == 0
    return outdir


def test_analyze_then_report(tmp_path, result_tree, capsys):
    summary_path = tmp_path / "summary.json"
    code = main(["analyze", str(result_tree), "-o", str(summary_path)])
    assert code == 0
    assert "1 platform(s)" in capsys.readouterr().out
    doc = json.loads(summary_path.read_text())
    assert doc["schema_version"] == 1

    report_dir = tmp_path / "report"
    code = main(["report", "--summary", str(summary_path), "--outdir", str(report_dir)])
    assert code == 0
    names = {p.name for p in report_dir.iterdir()}
    assert "report.md" in names
    assert len(names) == 12


def test_analyze_rejects_bad_thresholds(result_tree, tmp_path, capsys):
    for flag, value in (
        ("--single-threshold", "0"),
        ("--loader-threshold", "1.5"),
        ("--floor", "0"),
    ):
        code = main(["analyze", str(result_tree), "-o", str(tmp_path / "s.json"), flag, value])
        assert code == 2, flag
        assert "error:" in capsys.readouterr().err


def test_analyze_with_no_results_fails(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code = main(["analyze", str(empty)])
    assert code == 1
    assert "no result files" in capsys.readouterr().err


def test_report_with_missing_summary_fails(tmp_path, capsys):
    code = main(["report", "--summary", str(tmp_path / "missing.json")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# real backend end to end


def test_real_backend_full_pipeline(tmp_path, corpus_dir, capsys):
    outdir = tmp_path / "results"
    code = main(
        [
            "run",
            "--corpus",
            str(corpus_dir),
            "--adapters",
            "pillow",
            "--protocols",
            "single_thread,loader",
            "--workers",
            "0,2",
            "--repetitions",
            "2",
            "--warmup",
            "0",
            "--output",
            str(outdir),
        ]
    )
    assert code == 0
    result = read_result(single_result_file(outdir))
    assert len(result.cells) == 3
    for cell in result.cells:
        assert cell.decoded_count == 20
        assert cell.skipped_indices == ()
        assert all(s > 0 for s in cell.samples)

    summary_path = tmp_path / "summary.json"
    assert main(["analyze", str(outdir), "-o", str(summary_path)]) == 0
    report_dir = tmp_path / "report"
    assert main(["report", "--summary", str(summary_path), "--outdir", str(report_dir)]) == 0
    tier_text = (report_dir / "tab06_tier.md").read_text()
    assert "pillow" in tier_text
