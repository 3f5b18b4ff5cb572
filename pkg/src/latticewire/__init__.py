"""Lattice coset coding over a simulated wiretap link."""

from .coset import coset_encode, modulate
from .decode import DecoderConfig, md_decode, ml_decode
from .estimators import BinnedEntropyEstimator, CosetDecoder, CosetEncoder
from .exceptions import (
    ConfigurationError,
    DecodeError,
    InvalidPointError,
    PipelineError,
    SyncError,
)
from .lattice import SCHEMES, build_binary_code, carve_codebook, get_scheme, min_squared_distance
from .metrics import ber, ber_point, conditional_entropy, run_ber_sweep, run_entropy_sweep

__version__ = "0.1.0"

__all__ = [
    "SCHEMES",
    "BinnedEntropyEstimator",
    "ConfigurationError",
    "CosetDecoder",
    "CosetEncoder",
    "DecodeError",
    "DecoderConfig",
    "InvalidPointError",
    "PipelineError",
    "SyncError",
    "ber",
    "ber_point",
    "build_binary_code",
    "carve_codebook",
    "conditional_entropy",
    "coset_encode",
    "get_scheme",
    "md_decode",
    "min_squared_distance",
    "ml_decode",
    "modulate",
    "run_ber_sweep",
    "run_entropy_sweep",
]
