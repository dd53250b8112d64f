"""
The command line interface.
    gbm3d denoise --input noisy.pgm --output denoised.pgm --sigma 25 [--stage 2] [--reference clean.pgm]
    gbm3d denoise --input clean.pgm --output denoised.pgm --snr 4 --add-noise [--seed 0]
    gbm3d bench --images DIR [--output results.csv] [--snr 1 2 4 6 8 10] [--stages 1 2] [--deterministic]
"""
import sys
import argparse

from typing import List, Optional

from gbm3d.core import DenoiseParams, DenoisingError
from gbm3d.denoising import Denoiser
from .benchmark import DEFAULT_SEED, DEFAULT_SNRS, DEFAULT_STAGES, load_corpus, plot_results, run_benchmark, \
    write_csv
from .image_io import read_image, write_image
from .metrics import add_gaussian_noise, psnr, sigma_for_snr

# Exit code of failed commands, argparse exits with 2 on usage errors
_FAILURE = 1


def _load_params(path: Optional[str]) -> DenoiseParams:
    return DenoiseParams() if path is None else DenoiseParams.load(path)


def cmd_denoise(args: argparse.Namespace) -> int:
    """
    Denoises a single image, optionally adding seeded noise to it first.
    """
    img = read_image(args.input)
    sigma = args.sigma if args.sigma is not None else sigma_for_snr(img, args.snr)
    reference = read_image(args.reference) if args.reference else None
    if args.add_noise:
        # the input is the clean image
        if reference is None:
            reference = img
        img = add_gaussian_noise(img, sigma, args.seed)
    if reference is not None and reference.shape != img.shape:
        raise DenoisingError("the reference and the input differ in size")

    denoiser = Denoiser(_load_params(args.params), args.threads, not args.no_patches,
                        enable_printing=args.print_log, enable_logging=args.save_log)
    if args.stage == 2:
        estimates = denoiser.run_both(img, sigma)
    else:
        estimates = (denoiser.run(img, sigma, 1),)
    write_image(args.output, estimates[-1])

    if reference is not None:
        for stage, estimate in enumerate(estimates, start=1):
            print("stage-" + str(stage) + " PSNR: " + "{:.4f}".format(psnr(reference, estimate)) + " dB")
    if args.save_log:
        denoiser.save()
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    """
    Runs the bench harness on a directory of clean images and writes the records as csv.
    """
    corpus = load_corpus(args.images)
    records = run_benchmark(corpus, args.snr, args.stages, _load_params(args.params), args.seed, args.threads,
                            args.deterministic)
    if args.output:
        with open(args.output, "w", newline="") as f:
            write_csv(records, f)
    else:
        write_csv(records, sys.stdout)
    if args.plot_dir:
        plot_results(records, args.plot_dir)
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer, got " + text)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbm3d", description="Two-stage block matching image denoising.")
    commands = parser.add_subparsers(dest="command", required=True)

    denoise_parser = commands.add_parser("denoise", help="denoise a single image")
    denoise_parser.add_argument("--input", required=True, help="the image to denoise")
    denoise_parser.add_argument("--output", required=True, help="where to write the estimate")
    noise_level = denoise_parser.add_mutually_exclusive_group(required=True)
    noise_level.add_argument("--sigma", type=float, help="the standard deviation of the noise")
    noise_level.add_argument("--snr", type=float, help="the signal to noise ratio mean(image) / sigma")
    denoise_parser.add_argument("--add-noise", action="store_true",
                                help="treat the input as clean and add seeded Gaussian noise to it first")
    denoise_parser.add_argument("--stage", type=int, choices=Denoiser.STAGES, default=2)
    denoise_parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    denoise_parser.add_argument("--reference", help="a clean image to report the PSNR against")
    denoise_parser.add_argument("--no-patches", action="store_true", help="denoise the image in one piece")
    denoise_parser.add_argument("--print-log", action="store_true", help="print progress to stdout")
    denoise_parser.add_argument("--save-log", action="store_true", help="save a log and a run report under results/")
    denoise_parser.set_defaults(func=cmd_denoise)

    bench_parser = commands.add_parser("bench", help="run the PSNR and timing benchmark")
    bench_parser.add_argument("--images", required=True, help="a directory of clean images")
    bench_parser.add_argument("--output", help="the csv file to write, stdout if not given")
    bench_parser.add_argument("--snr", type=float, nargs="+", default=list(DEFAULT_SNRS))
    bench_parser.add_argument("--stages", type=int, nargs="+", choices=Denoiser.STAGES, default=list(DEFAULT_STAGES))
    bench_parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench_parser.add_argument("--deterministic", action="store_true",
                              help="record timings as 0 and skip the matching speedup")
    bench_parser.add_argument("--plot-dir", help="where to save PSNR plots")
    bench_parser.set_defaults(func=cmd_bench)

    for command_parser in (denoise_parser, bench_parser):
        command_parser.add_argument("--threads", type=_positive_int, default=1, help="the size of the worker pool")
        command_parser.add_argument("--params", help="a json file of denoising parameters")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else _FAILURE

    try:
        return args.func(args)
    except (DenoisingError, OSError) as error:
        print("gbm3d: error: " + str(error), file=sys.stderr)
        return _FAILURE


if __name__ == '__main__':
    sys.exit(main())
