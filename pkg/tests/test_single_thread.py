import math

import pytest

from jpegbench.adapters import Skip
from jpegbench.corpus import load_corpus
from jpegbench.errors import ConfigurationError, IntegrityError, ProtocolError
from jpegbench.fixtures import (
    REJECT_INDEX,
    STRICT_MARKER,
    make_sleep_decode,
    make_strict_decode,
    make_synthetic_corpus,
    write_fixture_corpus,
)
from jpegbench.single_thread import (
    NO_WORKERS,
    PROTOCOL_SINGLE,
    ProtocolResult,
    RunConfig,
    check_skip_consistency,
    run_single_thread,
    time_full_pass,
)


def test_run_single_thread_full_accounting(fixture_corpus, make_entry):
    entry = make_entry(decode=make_strict_decode())
    result = run_single_thread(entry, fixture_corpus, RunConfig(repetitions=2))
    assert result.protocol == PROTOCOL_SINGLE
    assert result.worker_count == NO_WORKERS
    assert result.corpus_size == len(fixture_corpus)
    assert result.decoded_count == len(fixture_corpus) - 1
    assert result.skipped_indices == (REJECT_INDEX,)
    assert not result.skips[0].backend_fault
    assert len(result.wall_times) == len(result.samples) == 2
    for wall, sample in zip(result.wall_times, result.samples):
        assert math.isclose(sample, result.decoded_count / wall, rel_tol=1e-9)


def test_zero_skip_adapter_decodes_everything(fixture_corpus, make_entry):
    entry = make_entry(name="plainpil", decode=make_strict_decode(b"never-present"))
    result = run_single_thread(entry, fixture_corpus, RunConfig(repetitions=1))
    assert result.decoded_count == len(fixture_corpus)
    assert result.skips == ()


def test_timing_needs_no_files_on_disk(tmp_path, make_entry):
    # The corpus must be memory-resident before any clock starts: decoding
    # must keep working after the backing files are gone.
    write_fixture_corpus(tmp_path, count=6)
    corpus = load_corpus(tmp_path)
    for path in tmp_path.iterdir():
        path.unlink()
    entry = make_entry(decode=make_strict_decode())
    result = run_single_thread(entry, corpus, RunConfig(repetitions=1))
    assert result.decoded_count == len(corpus)


def test_nondeterministic_skips_are_an_integrity_error(make_entry):
    corpus = make_synthetic_corpus(8)
    calls = {"n": 0}
    base = make_sleep_decode(0.0)

    def flaky(data):
        calls["n"] += 1
        if calls["n"] == 3:  # rejects one item on the first pass only
            raise ValueError("transient rejection")
        return base(data)

    entry = make_entry(decode=flaky)
    with pytest.raises(IntegrityError, match="skip sets differ"):
        run_single_thread(entry, corpus, RunConfig(repetitions=2, warmup_passes=1))


def test_all_skipped_is_a_protocol_error(make_entry):
    corpus = make_synthetic_corpus(4)

    def reject_all(data):
        raise ValueError("nope")

    with pytest.raises(ProtocolError, match="all_skipped"):
        run_single_thread(make_entry(decode=reject_all), corpus)


def test_unavailable_entry_rejected(make_entry):
    entry = make_entry()
    entry.available = False
    entry.unavailable_reason = "ImportError: gone"
    with pytest.raises(ConfigurationError):
        run_single_thread(entry, make_synthetic_corpus(3))


def test_time_full_pass_counts_marked_rejections(make_entry):
    corpus = make_synthetic_corpus(10, marked_indices={4: STRICT_MARKER})
    entry = make_entry(decode=make_sleep_decode(0.0, reject_marker=STRICT_MARKER))
    wall, decoded, skips = time_full_pass(entry, corpus)
    assert wall > 0.0
    assert decoded == 9
    assert [s.item_index for s in skips] == [4]


def test_check_skip_consistency_names_both_directions():
    ref = [Skip(reason="r", item_index=1)]
    obs = [Skip(reason="r", item_index=2)]
    with pytest.raises(IntegrityError, match=r"new: \[2\], vanished: \[1\]"):
        check_skip_consistency(ref, obs, "ctx")


class TestRunConfig:
    @pytest.mark.parametrize("reps, warm", [(0, 1), (-1, 1), (1, -1)])
    def test_rejects_bad_counts(self, reps, warm):
        with pytest.raises(ConfigurationError):
            RunConfig(repetitions=reps, warmup_passes=warm)

    def test_defaults(self):
        config = RunConfig()
        assert config.repetitions == 3 and config.warmup_passes == 1


class TestProtocolResult:
    def _kwargs(self, **overrides):
        base = dict(
            adapter_name="a",
            protocol=PROTOCOL_SINGLE,
            worker_count=NO_WORKERS,
            batch_size=None,
            repetitions=2,
            warmup_passes=1,
            corpus_size=10,
            decoded_count=9,
            wall_times=(1.0, 2.0),
            samples=(9.0, 4.5),
            skips=(Skip(reason="r", item_index=3),),
        )
        base.update(overrides)
        return base

    def test_valid(self):
        result = ProtocolResult(**self._kwargs())
        assert result.skipped_indices == (3,)

    def test_sample_wall_mismatch(self):
        with pytest.raises(ValueError):
            ProtocolResult(**self._kwargs(samples=(9.0, 5.0)))

    def test_skip_count_must_close_the_ledger(self):
        with pytest.raises(ValueError):
            ProtocolResult(**self._kwargs(skips=()))

    def test_skip_index_out_of_range(self):
        with pytest.raises(ValueError):
            ProtocolResult(**self._kwargs(skips=(Skip(reason="r", item_index=10),)))

    def test_duplicate_skip_indices(self):
        with pytest.raises(ValueError):
            ProtocolResult(
                **self._kwargs(
                    decoded_count=8,
                    wall_times=(1.0, 2.0),
                    samples=(8.0, 4.0),
                    skips=(
                        Skip(reason="r", item_index=3),
                        Skip(reason="r", item_index=3),
                    ),
                )
            )

    def test_single_protocol_requires_sentinel_worker_count(self):
        with pytest.raises(ValueError):
            ProtocolResult(**self._kwargs(worker_count=0))
