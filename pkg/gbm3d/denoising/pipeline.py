import os
import sys
import time
import logging
import dataclasses
import jsonpickle
from time import strftime

import numpy as np

from typing import Callable, List, NamedTuple, Optional, Tuple

from gbm3d.core import DenoiseParams, Image, InvalidInputError, parallel_map
from .stage1 import stage1_denoise
from .stage2 import stage2_denoise


class PatchPlan(NamedTuple):
    """
    Overlapping square patches covering an image. Patches are patch_size pixels wide, or the whole image
    extent along an axis the patch does not fit in; the last patch of every axis is shifted inward to end
    at the image border.
    """
    patch_size: int
    overlap: int
    width: int
    height: int
    row_origins: Tuple[int, ...]
    col_origins: Tuple[int, ...]

    @property
    def patch_shape(self) -> Tuple[int, int]:
        return min(self.patch_size, self.height), min(self.patch_size, self.width)

    @property
    def patch_count(self) -> int:
        return len(self.row_origins) * len(self.col_origins)

    def origins(self) -> List[Image.Position]:
        """
        :return: the top left pixels of all patches, in raster order.
        """
        return [(row, col) for row in self.row_origins for col in self.col_origins]


def _axis_origins(extent: int, size: int, overlap: int) -> Tuple[int, ...]:
    if extent <= size:
        return 0,
    origins = list(range(0, extent - size, size - overlap))
    origins.append(extent - size)
    return tuple(origins)


def plan_patches(width: int, height: int, n: int, base: int = DenoiseParams.DEFAULT_PATCH_BASE) -> PatchPlan:
    """
    Plans patches of side base + n that overlap by at least n pixels.
    """
    size = base + n
    return PatchPlan(size, n, width, height, _axis_origins(height, size, n), _axis_origins(width, size, n))


def _blend_ramp(length: int, overlap: int, ramp_start: bool, ramp_end: bool) -> np.ndarray:
    # rises linearly over the first `overlap` pixels and falls over the last ones, on inner sides only
    positions = np.arange(length)
    ramp = np.ones(length)
    if ramp_start:
        ramp = np.minimum(ramp, (positions + 1) / (overlap + 1))
    if ramp_end:
        ramp = np.minimum(ramp, (length - positions) / (overlap + 1))
    return ramp


def extract_patches(data: np.ndarray, plan: PatchPlan) -> List[np.ndarray]:
    patch_height, patch_width = plan.patch_shape
    return [data[row:row + patch_height, col:col + patch_width] for row, col in plan.origins()]


def stitch_patches(plan: PatchPlan, patches: List[np.ndarray]) -> np.ndarray:
    """
    Blends the patches into one image. Within the overlaps the patches are weighted by linear ramps that fall
    towards the patch borders lying inside the image.
    :param patches: one array per patch, in the raster order of plan.origins().
    """
    if len(patches) != plan.patch_count:
        raise InvalidInputError("expected " + str(plan.patch_count) + " patches, got " + str(len(patches)))

    patch_height, patch_width = plan.patch_shape
    numerator = np.zeros((plan.height, plan.width))
    denominator = np.zeros((plan.height, plan.width))
    for (row, col), patch in zip(plan.origins(), patches):
        if patch.shape != (patch_height, patch_width):
            raise InvalidInputError("patch at " + str((row, col)) + " has shape " + str(patch.shape))
        weights = np.outer(
            _blend_ramp(patch_height, plan.overlap, row > 0, row + patch_height < plan.height),
            _blend_ramp(patch_width, plan.overlap, col > 0, col + patch_width < plan.width))
        numerator[row:row + patch_height, col:col + patch_width] += weights * patch
        denominator[row:row + patch_height, col:col + patch_width] += weights
    return numerator / denominator


class Denoiser:
    """
    Denoises whole images with one or both estimates. Images are decomposed into overlapping patches that
    are denoised in parallel and stitched back after every stage.
    """

    # Default path to save all result files
    _DEFAULT_RESULTS_PATH = os.path.join(os.getcwd(), "results")

    # Default path for the log files
    _DEFAULT_LOG_PATH = os.path.join(_DEFAULT_RESULTS_PATH, "logs")

    # Suffix for log files
    _LOG_FILE_SUFFIX = ".log"

    # Default path for the run reports
    _DEFAULT_RUN_PATH = os.path.join(_DEFAULT_RESULTS_PATH, "runs")

    # Suffix for run report files
    _RUN_FILE_SUFFIX = ".json"

    # The supported stages: 1 for the first estimate alone, 2 for both estimates
    STAGES = (1, 2)

    def __init__(self,
                 params: DenoiseParams = DenoiseParams(),
                 workers: int = 1,
                 patched: bool = True,
                 enable_printing: bool = False,
                 enable_logging: bool = False):
        """
        Initializes the denoiser.
        :param params: the denoising parameters. Their sigma is replaced by the one given to each run.
        :param workers: the size of the worker pool that patches (or translation trials of unpatched images)
        are spread over. Results do not depend on it.
        :param patched: True if images should be decomposed into overlapping patches.
        :param enable_printing: True if the denoiser should print the logs on the screen.
        :param enable_logging: True if the denoiser should save the logs to a file.
        """
        self._params = params
        self._workers = workers
        self._patched = patched
        self._start_time = time.perf_counter()
        self._timings = {}
        self._last_run = {}

        if enable_printing or enable_logging:
            logging_handlers = []
            if enable_logging:
                os.makedirs(self._DEFAULT_LOG_PATH, exist_ok=True)
                logging_handlers.append(
                    logging.FileHandler(
                        os.path.join(self._DEFAULT_LOG_PATH, self._get_filename() + self._LOG_FILE_SUFFIX), mode='w+'))
            if enable_printing:
                logging_handlers.append(logging.StreamHandler(stream=sys.stdout))

            logging.basicConfig(level=logging.INFO, format='%(message)s', handlers=logging_handlers)

    @property
    def params(self) -> DenoiseParams:
        return self._params

    @property
    def timings(self):
        """
        :return: the wall time in seconds of every stage of the last run.
        """
        return dict(self._timings)

    def _log(self, text: str):
        """
        Logs the given text, prefixed by the time elapsed since the denoiser was created.
        """
        logging.info("Elapsed: " + "{:.2f}".format(time.perf_counter() - self._start_time) + "s, " + text)

    def _run_patches(self, job: Callable[..., Image], images: List[Image], n: int) -> Image:
        """
        Runs the job on the patches of the images and stitches the results.
        :param images: images of identical size; the job gets their patches at the same origin.
        """
        reference = images[0]
        if not self._patched:
            return job(*images, workers=self._workers)

        plan = plan_patches(reference.width, reference.height, n, self._params.patch_base)
        if plan.patch_count == 1:
            return job(*images, workers=self._workers)

        patch_lists = [[img.with_data(patch) for patch in extract_patches(img.data, plan)] for img in images]
        self._log("processing " + str(plan.patch_count) + " patches of side " + str(plan.patch_size))
        results = parallel_map(lambda patch_images: job(*patch_images, workers=1).data, list(zip(*patch_lists)),
                               self._workers)
        return reference.with_data(stitch_patches(plan, results))

    def run(self, img: Image, sigma: float, stage: int = 2) -> Image:
        """
        Denoises the image.
        :param sigma: the standard deviation of the noise.
        :param stage: 1 for the first estimate, 2 for the second estimate built on the first.
        """
        return self._run(img, sigma, stage)[-1]

    def run_both(self, img: Image, sigma: float) -> Tuple[Image, Image]:
        """
        :return: the first and the second estimates of the image.
        """
        basic, final = self._run(img, sigma, 2)
        return basic, final

    def _run(self, img: Image, sigma: float, stage: int) -> List[Image]:
        if stage not in self.STAGES:
            raise InvalidInputError("unknown stage: " + str(stage))
        params = self._params.replace(sigma=sigma)
        self._timings = {}
        self._log(str(self) + "\ndenoising " + str(img) + " with sigma " + str(sigma) + " up to stage " + str(stage))

        start = time.perf_counter()
        basic = self._run_patches(lambda noisy, workers: stage1_denoise(noisy, params, workers), [img], params.n1)
        self._timings[1] = time.perf_counter() - start
        self._log("stage 1 done in " + "{:.2f}".format(self._timings[1]) + "s")
        estimates = [basic]

        if stage == 2:
            start = time.perf_counter()
            final = self._run_patches(lambda noisy, pilot, workers: stage2_denoise(noisy, pilot, params, workers),
                                      [img, basic], params.n2)
            self._timings[2] = time.perf_counter() - start
            self._log("stage 2 done in " + "{:.2f}".format(self._timings[2]) + "s")
            estimates.append(final)

        self._last_run = {"width": img.width, "height": img.height, "sigma": sigma, "stage": stage}
        return estimates

    def __str__(self) -> str:
        return "Denoiser: workers: " + str(self._workers) + ", patched: " + str(self._patched) + \
               ", params: " + str(self._params)

    def _get_filename(self) -> str:
        """
        :return: a filename with the current time and the main parameters of the denoiser.
        """
        return "_".join([
            strftime("%Y%m%d-%H%M%S"),
            "n1", str(self._params.n1),
            "n2", str(self._params.n2),
            "k", str(self._params.k),
            "workers", str(self._workers),
        ])

    def save(self, path: Optional[os.PathLike] = None) -> str:
        """
        Saves a report of the last run (parameters, image size, sigma and stage timings) as json.
        :param path: the directory to save the report in, the default run path if not given.
        :return: the path of the report file.
        """
        if path is None:
            path = self._DEFAULT_RUN_PATH
        os.makedirs(path, exist_ok=True)

        report = dict(self._last_run, params=dataclasses.asdict(self._params), workers=self._workers,
                      patched=self._patched, seconds={str(stage): seconds for stage, seconds in self._timings.items()})
        filename = os.path.join(path, "run_" + self._get_filename() + self._RUN_FILE_SUFFIX)
        with open(filename, "w+") as f:
            f.write(jsonpickle.encode(report, indent=2))
        return filename


def denoise(img: Image, sigma: float, stage: int = 2, params: DenoiseParams = DenoiseParams(), workers: int = 1,
            patched: bool = True) -> Image:
    """
    Denoises the image with the first estimate (stage 1) or with both estimates (stage 2).
    """
    return Denoiser(params, workers, patched).run(img, sigma, stage)
