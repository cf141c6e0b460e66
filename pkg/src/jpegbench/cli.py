"""Command-line interface.

Commands: list-adapters, run, analyze, report. Exit codes: 0 on success,
1 when measurement or analysis failed (cell failures, malformed or
inconsistent result data), 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from .adapters import AdapterRegistry
from .analysis import StatisticalPolicy, TierPolicy, read_summary, summarize, write_summary
from .backends import build_default_registry
from .corpus import load_corpus
from .errors import BenchmarkError, ConfigurationError
from .loader import CellFailure, LoaderRunConfig, run_loader_sweep
from .report import write_report
from .results import (
    BenchmarkResult,
    capture_platform_metadata,
    default_platform_label,
    new_run_id,
    read_results,
    record_from_entry,
    result_path,
    corpus_summary_of,
    write_result,
)
from .single_thread import (
    NO_WORKERS,
    PROTOCOL_LOADER,
    PROTOCOL_SINGLE,
    RunConfig,
    run_single_thread,
)


def _parse_csv(raw: str) -> list[str]:
    return [token.strip() for token in raw.split(",") if token.strip()]


def _parse_workers(raw: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(token) for token in _parse_csv(raw))
    except ValueError:
        raise ConfigurationError(f"bad worker counts {raw!r}") from None
    if not counts:
        raise ConfigurationError("worker counts must be non-empty")
    return counts


def _parse_protocols(raw: str) -> set[str]:
    names = set(_parse_csv(raw))
    unknown = names - {PROTOCOL_SINGLE, PROTOCOL_LOADER}
    if unknown or not names:
        raise ConfigurationError(
            f"protocols must be a subset of "
            f"{{{PROTOCOL_SINGLE},{PROTOCOL_LOADER}}}, got {raw!r}"
        )
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jpegbench",
        description="JPEG decoder throughput benchmark and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list-adapters", help="show every registered adapter")
    p_list.add_argument("--threads", type=int, default=None, help="backend thread cap")

    p_run = sub.add_parser("run", help="measure adapters over a corpus")
    p_run.add_argument("--corpus", required=True, help="corpus root directory")
    p_run.add_argument(
        "--adapters", default="all", help="comma-separated adapter names, or 'all'"
    )
    p_run.add_argument(
        "--protocols",
        default=f"{PROTOCOL_SINGLE},{PROTOCOL_LOADER}",
        help="comma-separated subset of protocols to run",
    )
    p_run.add_argument("--workers", default="0,2,4,8", help="loader worker counts")
    p_run.add_argument("--batch-size", type=int, default=32)
    p_run.add_argument("--repetitions", type=int, default=3)
    p_run.add_argument("--warmup", type=int, default=1)
    p_run.add_argument("--limit", type=int, default=None, help="truncate the corpus")
    p_run.add_argument("--label", default=None, help="platform label override")
    p_run.add_argument("--machine-type", default=None, help="e.g. cloud instance type")
    p_run.add_argument("--arch-label", default=None, help="microarchitecture label")
    p_run.add_argument("--output", default="output", help="result tree root")
    p_run.add_argument("--threads", type=int, default=None, help="backend thread cap")

    p_an = sub.add_parser("analyze", help="derive statistics from result files")
    p_an.add_argument("results", nargs="+", help="result files or directories")
    p_an.add_argument("-o", "--out", default="analysis.json")
    p_an.add_argument("--single-threshold", type=float, default=0.01)
    p_an.add_argument("--loader-threshold", type=float, default=0.05)
    p_an.add_argument("--floor", type=float, default=0.90)
    p_an.add_argument(
        "--tier-allow-skips",
        action="store_true",
        help="admit skipping adapters into the recommendation tier",
    )

    p_rep = sub.add_parser("report", help="render tables and figures from a summary")
    p_rep.add_argument("--summary", default="analysis.json")
    p_rep.add_argument("--outdir", default="report")

    return parser


def cmd_list_adapters(args, registry: AdapterRegistry | None) -> int:
    registry = registry or build_default_registry(args.threads)
    width = max(len(name) for name in registry.names())
    for entry in registry.entries():
        d = entry.descriptor
        if entry.available:
            state = f"available ({d.backend_version})"
        else:
            state = f"unavailable: {entry.unavailable_reason}"
        eligibility = "loader-eligible" if d.loader_eligible else d.eligibility_reason
        line = f"{d.name:<{width}}  {eligibility:<22}  {state}"
        if d.strictness_note:
            line += f"  [{d.strictness_note}]"
        print(line)
    return 0


def cmd_run(args, registry: AdapterRegistry | None) -> int:
    registry = registry or build_default_registry(args.threads)
    if args.adapters.strip() == "all":
        names = registry.names()
    else:
        names = sorted(set(_parse_csv(args.adapters)))
        for name in names:
            if name not in registry:
                raise ConfigurationError(f"unknown adapter {name!r}")
        if not names:
            raise ConfigurationError("no adapters selected")
    protocols = _parse_protocols(args.protocols)
    run_config = RunConfig(repetitions=args.repetitions, warmup_passes=args.warmup)
    loader_config = LoaderRunConfig(
        worker_counts=_parse_workers(args.workers),
        batch_size=args.batch_size,
        repetitions=args.repetitions,
        warmup_passes=args.warmup,
    )

    corpus = load_corpus(args.corpus, limit=args.limit)
    print(f"corpus: {len(corpus)} items, {corpus.total_bytes / 1e6:.1f} MB in memory")

    meta = capture_platform_metadata(
        machine_type_label=args.machine_type,
        microarchitecture_label=args.arch_label,
    )
    label = args.label or default_platform_label(meta)

    cells = []
    failures: list[CellFailure] = []
    records = []
    for name in names:
        entry = registry.get(name)
        records.append(record_from_entry(entry))
        if not entry.available:
            print(f"{name}: unavailable ({entry.unavailable_reason}), skipping")
            continue
        if PROTOCOL_SINGLE in protocols:
            try:
                cells.append(run_single_thread(entry, corpus, run_config))
                print(f"{name}: single_thread done")
            except BenchmarkError as exc:
                failures.append(
                    CellFailure(name, PROTOCOL_SINGLE, NO_WORKERS, f"{type(exc).__name__}: {exc}")
                )
                print(f"{name}: single_thread FAILED: {exc}", file=sys.stderr)
        if PROTOCOL_LOADER in protocols:
            if not entry.descriptor.loader_eligible:
                print(
                    f"{name}: loader protocol skipped "
                    f"({entry.descriptor.eligibility_reason})"
                )
            else:
                swept, sweep_failures = run_loader_sweep(entry, corpus, loader_config)
                cells.extend(swept)
                failures.extend(sweep_failures)
                done = ",".join(str(c.worker_count) for c in swept)
                print(f"{name}: loader done (w={done})")
                for failure in sweep_failures:
                    print(
                        f"{name}: loader w={failure.worker_count} FAILED: "
                        f"{failure.error}",
                        file=sys.stderr,
                    )

    result = BenchmarkResult(
        platform_label=label,
        platform=meta,
        corpus_summary=corpus_summary_of(corpus),
        run_config={
            "adapters": list(names),
            "protocols": sorted(protocols),
            "repetitions": args.repetitions,
            "warmup_passes": args.warmup,
            "worker_counts": list(loader_config.worker_counts),
            "batch_size": args.batch_size,
            "queue_depth_per_worker": 2,
            "clock": "perf_counter",
            "decode_flags": "backend-defaults-full-resolution",
            "backend_thread_cap": args.threads if args.threads is not None else 1,
            "corpus_limit": args.limit,
        },
        adapters=tuple(records),
        cells=tuple(cells),
        failures=tuple(failures),
    )
    path = write_result(result, result_path(args.output, label, new_run_id()))
    print(f"wrote {path} ({len(cells)} cells, {len(failures)} failures)")
    if not cells:
        print("error: no cell produced a measurement", file=sys.stderr)
        return 1
    return 1 if failures else 0


def cmd_analyze(args) -> int:
    for name, value in (
        ("--single-threshold", args.single_threshold),
        ("--loader-threshold", args.loader_threshold),
    ):
        if not (0.0 < value < 1.0):
            raise ConfigurationError(f"{name} must be in (0, 1), got {value}")
    if not (0.0 < args.floor <= 1.0):
        raise ConfigurationError(f"--floor must be in (0, 1], got {args.floor}")

    results = read_results(args.results)
    summary = summarize(
        results,
        StatisticalPolicy(
            single_thread_threshold=args.single_threshold,
            loader_threshold=args.loader_threshold,
        ),
        TierPolicy(
            normalized_floor=args.floor,
            require_zero_skips=not args.tier_allow_skips,
        ),
    )
    write_summary(summary, args.out)
    print(
        f"wrote {args.out}: {len(summary.platforms)} platform(s), "
        f"{len(summary.tier)} tier member(s)"
    )
    return 0


def cmd_report(args) -> int:
    summary = read_summary(args.summary)
    paths = write_report(summary, args.outdir)
    print(f"wrote {len(paths)} files under {args.outdir}")
    return 0


def main(argv=None, registry: AdapterRegistry | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-adapters":
            return cmd_list_adapters(args, registry)
        if args.command == "run":
            return cmd_run(args, registry)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "report":
            return cmd_report(args)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BenchmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
