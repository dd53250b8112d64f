import io
import os
import pytest

from gbm3d.core import DenoiseParams, InvalidInputError
from gbm3d.evaluation import CSV_HEADER, MATCH_SPEEDUP_STAGE, load_corpus, run_benchmark, matching_speedup, \
    write_csv, plot_results, write_image


class TestBenchmark:
    """
    Test suite for the bench harness.
    """

    PARAMS = DenoiseParams(k=8)

    @staticmethod
    def csv_text(records):
        stream = io.StringIO()
        write_csv(records, stream)
        return stream.getvalue()

    def test_single_experiment(self, clean_image):
        records = run_benchmark([("smooth", clean_image)], [4], [1], TestBenchmark.PARAMS, deterministic=True)
        assert len(records) == 1
        record = records[0]
        assert (record.image, record.size, record.stage, record.seconds) == ("smooth", "64x64", "1", 0.0)
        assert record.psnr_denoised > record.psnr_noisy

        lines = TestBenchmark.csv_text(records).splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 2
        assert lines[1].startswith("smooth,64x64,4,")

    def test_both_stages(self, clean_image):
        records = run_benchmark([("smooth", clean_image)], [2, 4], [1, 2], TestBenchmark.PARAMS)
        stages = [record.stage for record in records]
        assert stages == ["1", "2", "1", "2", MATCH_SPEEDUP_STAGE]
        assert all(record.seconds > 0 for record in records)
        assert records[1].seconds >= records[0].seconds

    @pytest.mark.determinism
    def test_deterministic_csv(self, clean_image, make_image):
        corpus = [("first", clean_image), ("second", make_image(48, seed=1))]
        first = run_benchmark(corpus, [4], [1, 2], TestBenchmark.PARAMS, seed=3, deterministic=True)
        second = run_benchmark(corpus, [4], [1, 2], TestBenchmark.PARAMS, seed=3, workers=2, deterministic=True)
        assert TestBenchmark.csv_text(first) == TestBenchmark.csv_text(second)

    def test_speedup_per_size(self, clean_image, make_image):
        corpus = [("first", clean_image), ("second", make_image(64, seed=1)), ("third", make_image(32))]
        records = run_benchmark(corpus, [4], [1], TestBenchmark.PARAMS)
        speedups = [record for record in records if record.stage == MATCH_SPEEDUP_STAGE]
        assert [record.size for record in speedups] == ["64x64", "32x32"]
        assert speedups[0].row()[2:4] == ["", ""]

    def test_matching_speedup(self, clean_image):
        assert matching_speedup(clean_image, TestBenchmark.PARAMS) > 0

    def test_invalid(self, clean_image):
        with pytest.raises(InvalidInputError):
            run_benchmark([], [4], [1])
        with pytest.raises(InvalidInputError):
            run_benchmark([("smooth", clean_image)], [4], [3])

    def test_load_corpus(self, tmp_path, clean_image, make_image):
        write_image(tmp_path / "b.pgm", clean_image)
        write_image(tmp_path / "a.rawf64", make_image(32))
        (tmp_path / "notes.txt").write_text("not an image")
        corpus = load_corpus(tmp_path)
        assert [name for name, _ in corpus] == ["a", "b"]
        assert corpus[1][1].shape == (64, 64)

        os.makedirs(tmp_path / "empty")
        with pytest.raises(InvalidInputError):
            load_corpus(tmp_path / "empty")

    def test_plot(self, tmp_path, clean_image):
        records = run_benchmark([("smooth", clean_image)], [2, 4], [1], TestBenchmark.PARAMS, deterministic=True)
        filenames = plot_results(records, tmp_path / "graphs")
        assert len(filenames) == 1
        assert filenames[0].endswith(".svg")
        assert os.path.getsize(filenames[0]) > 0
