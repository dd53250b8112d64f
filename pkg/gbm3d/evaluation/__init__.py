from .metrics import NoiseSpec, PSNR_PEAK, sigma_for_snr, add_gaussian_noise, mse, psnr
from .image_io import PGM, RAWF64, PNG, image_format, quantize, read_image, write_image
from .benchmark import BenchRecord, CSV_HEADER, MATCH_SPEEDUP_STAGE, load_corpus, run_benchmark, matching_speedup, \
    write_csv, plot_results
