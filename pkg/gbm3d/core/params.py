import os
import dataclasses
import jsonpickle

from dataclasses import dataclass
from typing import List, Optional, get_args

from .errors import InvalidInputError


def _check_type(name: str, value, annotation):
    """
    Raises an InvalidInputError unless the value fits the annotated field type. Integers fit float fields.
    """
    allowed = get_args(annotation) or (annotation,)
    if float in allowed:
        allowed += (int,)
    # bool is a subclass of int
    if not isinstance(value, allowed) or (isinstance(value, bool) and bool not in allowed):
        raise InvalidInputError(name + " must be of type " + getattr(annotation, "__name__", str(annotation)) +
                                ", got " + repr(value))


@dataclass(frozen=True)
class DenoiseParams:
    """
    Every tunable of the two denoising stages.
    :param n1: block size of the wavelet thresholding stage.
    :param n2: block size of the Wiener filtering stage.
    :param k: the number of matched blocks per reference block, including the reference itself.
    :param window: side of the local search window.
    :param levels: number of levels in the 3D wavelet transform.
    :param spins: number of cycle-spins of the volume filtering, shifts 0, 1, ..., spins - 1.
    :param trials: number of translation trials that create new reference tilings.
    :param sigma: the standard deviation of the noise, in intensity units.
    :param tau_match: optional distance cutoff, candidates at or above it are not matched.
    :param min_matches: the number of matches kept regardless of tau_match (the reference counts).
    :param eps_tv: guards the division by the total variation of a constant group.
    :param threshold_base: the level threshold is sigma * (threshold_base - threshold_slope * level).
    :param threshold_slope: see threshold_base.
    :param weighting: "tv" for inverse total variation aggregation weights, "uniform" for unit weights.
    :param global_search: True if blocks are searched in the entire image instead of the local window.
    :param wavelet_xy: name of the filter bank used along the image axes.
    :param wavelet_z: name of the filter bank used along the stacking axis.
    :param patch_base: image patches have side patch_base + block size.
    """
    DEFAULT_N1 = 16
    DEFAULT_N2 = 8
    DEFAULT_K = 16
    DEFAULT_WINDOW = 32
    DEFAULT_LEVELS = 3
    DEFAULT_SPINS = 2
    DEFAULT_TRIALS = 3
    DEFAULT_EPS_TV = 1e-3
    DEFAULT_PATCH_BASE = 256

    # The supported aggregation weight flavors
    WEIGHTINGS = ("tv", "uniform")

    n1: int = DEFAULT_N1
    n2: int = DEFAULT_N2
    k: int = DEFAULT_K
    window: int = DEFAULT_WINDOW
    levels: int = DEFAULT_LEVELS
    spins: int = DEFAULT_SPINS
    trials: int = DEFAULT_TRIALS
    sigma: float = 0.0
    tau_match: Optional[float] = None
    min_matches: int = 1
    eps_tv: float = DEFAULT_EPS_TV
    threshold_base: float = 3.6
    threshold_slope: float = 0.3
    weighting: str = "tv"
    global_search: bool = False
    wavelet_xy: str = "bior1.5"
    wavelet_z: str = "haar"
    patch_base: int = DEFAULT_PATCH_BASE

    def __post_init__(self):
        for name in ("n1", "n2", "k", "window", "spins", "trials", "min_matches", "patch_base"):
            if getattr(self, name) < 1:
                raise InvalidInputError(name + " must be positive, got " + str(getattr(self, name)))
        if self.levels < 0:
            raise InvalidInputError("levels must not be negative, got " + str(self.levels))
        # the stacking axis must admit `levels` dyadic halvings
        if self.k & (self.k - 1) or self.k < (1 << self.levels):
            raise InvalidInputError("k must be a power of two of at least 2^levels, got " + str(self.k))
        if self.window < max(self.n1, self.n2):
            raise InvalidInputError("the search window must be at least the block size")
        if self.min_matches > self.k:
            raise InvalidInputError("min_matches cannot exceed k")
        if self.sigma < 0:
            raise InvalidInputError("sigma must not be negative, got " + str(self.sigma))
        if self.eps_tv <= 0:
            raise InvalidInputError("eps_tv must be positive, got " + str(self.eps_tv))
        if self.weighting not in self.WEIGHTINGS:
            raise InvalidInputError("unknown weighting: " + str(self.weighting))

    def replace(self, **changes) -> "DenoiseParams":
        """
        :return: a copy of the parameters with the given fields changed (and validated).
        """
        return dataclasses.replace(self, **changes)

    def trial_shifts(self, n: int) -> List[int]:
        """
        :return: the cyclic image shifts of the translation trials for block size n: 0, n/4, n/2, ...
        """
        spacing = max(n // 4 if self.trials <= 4 else n // self.trials, 1)
        return [(trial * spacing) % n for trial in range(self.trials)]

    def spin_shifts(self) -> List[int]:
        """
        :return: the cyclic volume shifts of the cycle-spinning.
        """
        return list(range(self.spins))

    def save(self, path: os.PathLike) -> str:
        """
        Saves the parameters to the given path as json.
        """
        json = jsonpickle.encode(dataclasses.asdict(self), indent=2)
        directory = os.path.dirname(os.fspath(path))
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w+") as f:
            f.write(json)
        return json

    @classmethod
    def load(cls, path: os.PathLike) -> "DenoiseParams":
        """
        Loads parameters saved by save, or any json object whose keys are field names.
        """
        with open(path, "r") as f:
            return cls.from_json(f.read())

    @classmethod
    def from_json(cls, json: str) -> "DenoiseParams":
        try:
            decoded = jsonpickle.decode(json)
        except Exception as error:
            # the decoding backends raise their own error types
            raise InvalidInputError("malformed parameters: " + str(error))
        if isinstance(decoded, cls):
            decoded = dataclasses.asdict(decoded)
        if not isinstance(decoded, dict):
            raise InvalidInputError("parameters must be a json object")

        fields = {field.name: field for field in dataclasses.fields(cls)}
        unknown = set(decoded) - set(fields)
        if unknown:
            raise InvalidInputError("unknown parameters: " + ", ".join(sorted(map(str, unknown))))
        for name, value in decoded.items():
            _check_type(name, value, fields[name].type)
        return cls(**decoded)
