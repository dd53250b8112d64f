"""
The bench harness: denoises a corpus of clean images at several noise levels with both estimates, records the
PSNR before and after denoising, and measures how much faster the correlation matching is than the naive one.
"""
import os
import csv
import time
import logging
import itertools
import matplotlib.pyplot as pyplot

from typing import Iterable, Iterator, List, NamedTuple, Optional, TextIO, Tuple

from gbm3d.core import DenoiseParams, Image, InvalidInputError, pad_image
from gbm3d.matching import FFT_METHOD, NAIVE_METHOD, build_match_table
from gbm3d.denoising import Denoiser
from .image_io import read_image, image_format
from .metrics import NoiseSpec, add_gaussian_noise, psnr

logger = logging.getLogger(__name__)

# Default path to save all result files
DEFAULT_RESULTS_PATH = os.path.join(os.getcwd(), "results")

# Default path to save all graph result files
DEFAULT_GRAPH_PATH = os.path.join(DEFAULT_RESULTS_PATH, "graphs")

# The signal to noise ratios of the standard experiments
DEFAULT_SNRS = (1, 2, 4, 6, 8, 10)

DEFAULT_STAGES = (1, 2)

DEFAULT_SEED = 0

CSV_HEADER = ("image", "size", "snr", "sigma", "stage", "psnr_noisy", "psnr_denoised", "seconds", "seed")

# The stage column of the matching speedup rows, whose seconds column holds naive time / correlation time
MATCH_SPEEDUP_STAGE = "match_speedup"

# A named clean image
CorpusEntry = Tuple[str, Image]


class BenchRecord(NamedTuple):
    """
    A single row of the bench results. Speedup rows leave the noise and PSNR columns empty.
    """
    image: str
    size: str
    snr: Optional[float]
    sigma: Optional[float]
    stage: str
    psnr_noisy: Optional[float]
    psnr_denoised: Optional[float]
    seconds: float
    seed: Optional[int]

    def row(self) -> List[str]:
        def decibels(value: Optional[float]) -> str:
            return "" if value is None else "{:.4f}".format(value)

        return [self.image, self.size,
                "" if self.snr is None else "{:g}".format(self.snr),
                "" if self.sigma is None else "{:.6f}".format(self.sigma),
                self.stage, decibels(self.psnr_noisy), decibels(self.psnr_denoised),
                "{:.3f}".format(self.seconds),
                "" if self.seed is None else str(self.seed)]


def _size(img: Image) -> str:
    return str(img.width) + "x" + str(img.height)


def load_corpus(directory: os.PathLike) -> List[CorpusEntry]:
    """
    :return: every readable image of the directory with its file name, sorted by name.
    """
    entries = []
    for filename in sorted(os.listdir(directory)):
        try:
            image_format(filename)
        except InvalidInputError:
            continue
        entries.append((os.path.splitext(filename)[0], read_image(os.path.join(directory, filename))))
    if not entries:
        raise InvalidInputError("no images found in " + os.fspath(directory))
    return entries


def experiment_iterator(corpus: Iterable[CorpusEntry], snrs: Iterable[float]) -> Iterator[Tuple[CorpusEntry, float]]:
    """
    :return: an iterator on all (image, snr) combinations, images first.
    """
    return itertools.product(corpus, snrs)


def run_benchmark(corpus: List[CorpusEntry],
                  snrs: Iterable[float] = DEFAULT_SNRS,
                  stages: Iterable[int] = DEFAULT_STAGES,
                  params: DenoiseParams = DenoiseParams(),
                  seed: int = DEFAULT_SEED,
                  workers: int = 1,
                  deterministic: bool = False) -> List[BenchRecord]:
    """
    Denoises every image of the corpus at every signal to noise ratio.
    :param stages: the estimates to record. The second estimate is always built on the first one.
    :param deterministic: True if timings should be recorded as 0 and the matching speedup skipped, making the
    records a function of the inputs alone.
    :return: one record per image, snr and stage, followed by one matching speedup row per image size.
    """
    if not corpus:
        raise InvalidInputError("the corpus is empty")
    stages = sorted(set(stages))
    if not stages or any(stage not in Denoiser.STAGES for stage in stages):
        raise InvalidInputError("stages must be a non empty subset of " + str(Denoiser.STAGES))

    denoiser = Denoiser(params, workers)
    records = []
    for (name, clean), snr in experiment_iterator(corpus, snrs):
        noise = NoiseSpec.for_image(clean, snr, seed)
        noisy = add_gaussian_noise(clean, noise.sigma, noise.seed)
        noisy_psnr = psnr(clean, noisy)
        if max(stages) == 2:
            estimates = dict(zip((1, 2), denoiser.run_both(noisy, noise.sigma)))
        else:
            estimates = {1: denoiser.run(noisy, noise.sigma, 1)}
        timings = denoiser.timings

        for stage in stages:
            seconds = 0.0 if deterministic else sum(timings[cur_stage] for cur_stage in range(1, stage + 1))
            records.append(BenchRecord(name, _size(clean), snr, noise.sigma, str(stage), noisy_psnr,
                                       psnr(clean, estimates[stage]), seconds, seed))
            logger.info("%s at snr %g, stage %d: %.2f dB -> %.2f dB", name, snr, stage, noisy_psnr,
                        records[-1].psnr_denoised)

    if not deterministic:
        measured_sizes = set()
        for name, clean in corpus:
            if clean.shape not in measured_sizes:
                measured_sizes.add(clean.shape)
                records.append(BenchRecord(name, _size(clean), None, None, MATCH_SPEEDUP_STAGE, None, None,
                                           matching_speedup(clean, params), None))
    return records


def matching_speedup(img: Image, params: DenoiseParams = DenoiseParams()) -> float:
    """
    Matches the first stage tiling of the image with both distance computations.
    :return: the naive matching time divided by the correlation matching time.
    """
    padded = pad_image(img, params.n1, params.levels)
    seconds = {}
    for method in (FFT_METHOD, NAIVE_METHOD):
        start = time.perf_counter()
        build_match_table(padded, params, params.n1, method)
        seconds[method] = time.perf_counter() - start
    return seconds[NAIVE_METHOD] / max(seconds[FFT_METHOD], 1e-9)


def write_csv(records: Iterable[BenchRecord], stream: TextIO):
    """
    Writes the records to the stream, header first.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.row())


def plot_results(records: Iterable[BenchRecord], path: os.PathLike = DEFAULT_GRAPH_PATH) -> List[str]:
    """
    Plots the denoised PSNR as a function of the SNR, one figure per stage and one line per image.
    :return: the paths of the saved svg files.
    """
    records = [record for record in records if record.stage != MATCH_SPEEDUP_STAGE]
    os.makedirs(path, exist_ok=True)
    style_cycler = itertools.cycle(["-", "--", "-.", ":"])
    marker_cycler = itertools.cycle(["o", "^", "<", ">", "v", ".", "*", "x", "D", "d"])

    filenames = []
    for stage in sorted({record.stage for record in records}):
        fig = pyplot.figure()
        ax = pyplot.axes()
        header = "PSNR after stage " + stage + " as a function of the SNR"
        ax.set_title(header)
        ax.set_xlabel("SNR")
        ax.set_ylabel("PSNR [dB]")

        for name in sorted({record.image for record in records}):
            relevant = sorted((record.snr, record.psnr_denoised) for record in records
                              if record.stage == stage and record.image == name)
            pyplot.plot([snr for snr, _ in relevant], [value for _, value in relevant],
                        marker=next(marker_cycler), linestyle=next(style_cycler), label=name)

        pyplot.legend()
        pyplot.tight_layout()
        filename = os.path.join(path, "psnr_stage_" + stage + "_" + time.strftime("%Y%m%d-%H%M%S") + ".svg")
        pyplot.savefig(filename, bbox_inches='tight')
        pyplot.close(fig)
        filenames.append(filename)
    return filenames
