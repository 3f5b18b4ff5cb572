"""Confidentiality metrics: binned conditional entropy, BER, and sweeps."""

from __future__ import annotations

import csv
import io
import math
import warnings
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from .coset import ROTATION, average_energy, encode_indices, modulate
from .decode import DecoderConfig
from .exceptions import ConfigurationError, EstimationQualityWarning, SyncError
from .lattice import get_scheme
from .link import indices_to_bits, transmit_secrets
from .phy import BATCH_FRAMES, ChannelInstance, Receiver, frame_capacity

CSV_HEADER = ("scheme", "snr_db", "metric", "value", "stderr", "samples", "seed")
MIN_OCCUPIED_BINS = 10
# default-width bins are widened until occupied cells average at least this many samples
MIN_MEAN_OCCUPANCY = 20


def point_rng(seed: int, scheme: str, snr_db: float) -> np.random.Generator:
    """Independent stream for one sweep point, derived from (seed, scheme, snr)."""
    key = [int(seed) & 0xFFFFFFFF, zlib.crc32(scheme.encode()), int(round(snr_db * 1000)) & 0xFFFFFFFF]
    return np.random.default_rng(np.random.SeedSequence(key))


# ---------------------------------------------------------------- entropy


@dataclass(frozen=True)
class EntropyEstimate:
    h_cond: float
    bin_width: float
    sample_count: int
    scheme: str
    snr_db: float
    k: int
    occupied_bins: int
    low_quality: bool = False
    stderr: float = float("nan")


def plugin_conditional_entropy(bin_ids, labels, n_labels: int) -> tuple[float, int]:
    """``H(label | bin)`` in bits from paired samples; returns ``(H, occupied_bins)``."""
    bin_ids = np.asarray(bin_ids)
    if bin_ids.ndim == 2:
        _, bin_ids = np.unique(bin_ids, axis=0, return_inverse=True)
    else:
        _, bin_ids = np.unique(bin_ids, return_inverse=True)
    bin_ids = bin_ids.ravel()
    n_bins = int(bin_ids.max()) + 1
    joint = np.bincount(bin_ids * n_labels + np.asarray(labels), minlength=n_bins * n_labels)
    joint = joint.reshape(n_bins, n_labels).astype(float)
    per_bin = joint.sum(axis=1)
    n = per_bin.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        q = joint / per_bin[:, None]
        terms = np.where(joint > 0, -q * np.log2(q), 0.0)
    h_bin = terms.sum(axis=1)
    return float(np.sum(per_bin / n * h_bin)), n_bins


def _occupied(cells: np.ndarray) -> int:
    if cells.shape[1] == 1:
        return int(np.unique(cells).size)
    return int(np.unique(cells, axis=0).shape[0])


def equalized_noise_std(snr_db: float, noise: str, h: complex = 1.0) -> float:
    """Std-dev of the noise on the projected signal axis after equalization."""
    sigma2 = 10 ** (-snr_db / 10)
    per_axis = sigma2 / 2 if noise == "complex" else sigma2
    return math.sqrt(per_axis) / abs(h)


def default_bin_width(sigma_eq: float, M: int) -> float:
    spacing = 1.0 / math.sqrt(average_energy(M))
    return min(sigma_eq / 8, spacing / 16)


def conditional_entropy(
    scheme,
    snr_db: float,
    trials: int = 100_000,
    bin_width: float | None = None,
    rng: np.random.Generator | None = None,
    noise: str = "real",
    h: complex = 1.0,
    n_batches: int = 10,
) -> EntropyEstimate:
    """Monte-Carlo ``H(s | y)`` by binning the received signal.

    Uniform secrets and randomness go through the scheme; each received
    coordinate is equalized by ``h`` and projected on the signal axis, then
    binned with width ``bin_width``. The estimate is the bin-probability
    weighted average of the per-bin secret entropy. Without an explicit
    ``bin_width`` the default width is doubled until occupied cells hold
    ``MIN_MEAN_OCCUPANCY`` samples on average, which matters for L > 1.

    ``noise="real"`` adds real Gaussian noise of variance ``sigma^2`` to the
    real signal (a scalar channel on the real line); ``noise="complex"``
    sends the rotated complex symbol through ``CN(0, sigma^2)`` and keeps
    the in-axis component.

    The reported ``stderr`` is a batch-means error over ``n_batches``
    sub-samples.
    """
    s = get_scheme(scheme)
    if trials < 1:
        raise ConfigurationError("trials must be positive")
    if bin_width is not None and not bin_width > 0:
        raise ConfigurationError("bin_width must be positive")
    if noise not in ("real", "complex"):
        raise ConfigurationError(f"noise must be 'real' or 'complex', got {noise!r}")
    rng = rng if rng is not None else np.random.default_rng()
    cb = s.codebook()
    secret = rng.integers(0, 2**cb.k, size=trials)
    rand = rng.integers(0, 2**cb.r, size=trials)
    x = modulate(encode_indices(secret, rand, cb), cb.M)
    sigma2 = 10 ** (-snr_db / 10)
    if noise == "complex":
        y = h * x + math.sqrt(sigma2 / 2) * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
        u = np.real(y / h / ROTATION)
    else:
        amp = np.real(x / ROTATION)
        u = (abs(h) * amp + math.sqrt(sigma2) * rng.standard_normal(amp.shape)) / abs(h)
    if bin_width is None:
        width = default_bin_width(equalized_noise_std(snr_db, noise, h), cb.M)
        # joint cells grow as width^-L; keep the plug-in estimate out of the one-sample-per-cell regime
        while _occupied(np.floor(u / width).astype(np.int64)) * MIN_MEAN_OCCUPANCY > trials:
            width *= 2
    else:
        width = bin_width
    bins = np.floor(u / width).astype(np.int64)
    if bins.shape[1] == 1:
        bins = bins[:, 0]
    h_cond, occupied = plugin_conditional_entropy(bins, secret, 2**cb.k)

    stderr = float("nan")
    if n_batches > 1 and trials >= 100 * n_batches:
        parts = np.array_split(np.arange(trials), n_batches)
        vals = [plugin_conditional_entropy(bins[p], secret[p], 2**cb.k)[0] for p in parts]
        stderr = float(np.std(vals, ddof=1) / math.sqrt(n_batches))

    low = occupied < MIN_OCCUPIED_BINS
    if low:
        warnings.warn(
            f"only {occupied} occupied bins for {s.name} at {snr_db} dB", EstimationQualityWarning, stacklevel=2
        )
    return EntropyEstimate(
        h_cond=min(max(h_cond, 0.0), float(cb.k)),
        bin_width=width,
        sample_count=trials,
        scheme=s.name,
        snr_db=float(snr_db),
        k=cb.k,
        occupied_bins=occupied,
        low_quality=low,
        stderr=stderr,
    )


def normalize_entropy(e: EntropyEstimate) -> float:
    if e.k < 1:
        raise ConfigurationError("normalization needs k >= 1")
    return e.h_cond / e.k


# ---------------------------------------------------------------- BER


@dataclass(frozen=True)
class BerPoint:
    scheme: str
    snr_db: float
    ber: float
    bits_counted: int
    errors: int = 0
    flagged: bool = False
    sync_failures: int = 0

    @property
    def stderr(self) -> float:
        """Binomial standard error of the BER estimate."""
        if self.bits_counted == 0:
            return float("nan")
        p = self.ber
        return math.sqrt(p * (1 - p) / self.bits_counted)


def ber(tx_bits, rx_bits, scheme: str = "", snr_db: float = float("nan")) -> BerPoint:
    """Fraction of differing bit positions.

    Raises:
        ValueError: on length mismatch.
    """
    a = np.asarray(tx_bits, dtype=np.uint8).ravel()
    b = np.asarray(rx_bits, dtype=np.uint8).ravel()
    if a.size != b.size:
        raise ValueError(f"bit sequences differ in length ({a.size} vs {b.size})")
    errors = int(np.count_nonzero(a != b))
    return BerPoint(scheme, float(snr_db), errors / a.size if a.size else 0.0, int(a.size), errors)


def ber_point(
    scheme,
    snr_db: float,
    secret_bits: int,
    rng: np.random.Generator,
    jitter_db: float = 0.0,
    decoder: DecoderConfig | None = None,
    max_sync_failure_rate: float = 0.01,
) -> BerPoint:
    """BER of one scheme at one SNR through the full frame pipeline.

    Secrets are sent in 10-frame transmissions, each with a fresh channel
    phase and timing offset. Transmissions that fail to synchronize are
    dropped and counted; the point is flagged when more than
    ``max_sync_failure_rate`` of them fail.
    """
    s = get_scheme(scheme)
    per_tx = frame_capacity(s.L) * BATCH_FRAMES
    n_cw = -(-secret_bits // s.k)
    n_tx = -(-n_cw // per_tx)
    receiver = Receiver()
    errors = bits = failures = 0
    for _ in range(n_tx):
        idx = rng.integers(0, 2**s.k, size=per_tx)
        ch = ChannelInstance.from_snr(snr_db, phase=rng.uniform(0, 2 * np.pi), jitter_db=jitter_db)
        try:
            res = transmit_secrets(idx, s, ch, rng, decoder, receiver)
        except SyncError:
            failures += 1
            continue
        point = ber(indices_to_bits(res.sent, s.k), indices_to_bits(res.decoded, s.k))
        errors += point.errors
        bits += point.bits_counted
    flagged = failures > max_sync_failure_rate * n_tx
    return BerPoint(s.name, float(snr_db), errors / bits if bits else float("nan"), bits, errors, flagged, failures)


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepResult:
    points: list
    seed: int
    config: dict = field(default_factory=dict)

    def rows(self):
        for p in self.points:
            if isinstance(p, BerPoint):
                yield (p.scheme, p.snr_db, "ber", p.ber, p.stderr, p.bits_counted, self.seed)
            else:
                yield (p.scheme, p.snr_db, "h_cond", p.h_cond, p.stderr, p.sample_count, self.seed)
                yield (p.scheme, p.snr_db, "h_cond_norm", normalize_entropy(p), p.stderr / p.k, p.sample_count, self.seed)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows())


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def run_ber_sweep(
    schemes,
    snr_list_db,
    secret_bits_target: int,
    seed: int,
    jitter_db: float = 0.0,
    decoder: DecoderConfig | None = None,
) -> SweepResult:
    """One :class:`BerPoint` per (scheme, SNR), each with its own derived RNG stream."""
    if secret_bits_target < 1:
        raise ConfigurationError("secret_bits_target must be positive")
    if seed is None:
        raise ConfigurationError("a seed is required")
    decoder = decoder or DecoderConfig()
    points = []
    for name in schemes:
        name = get_scheme(name).name
        for snr in snr_list_db:
            rng = point_rng(seed, name, snr)
            points.append(ber_point(name, snr, secret_bits_target, rng, jitter_db, decoder))
    cfg = {
        "schemes": [get_scheme(n).name for n in schemes],
        "snr_db": list(map(float, snr_list_db)),
        "secret_bits": secret_bits_target,
        "jitter_db": jitter_db,
        "decoder": asdict(decoder),
    }
    return SweepResult(points, seed, cfg)


def run_entropy_sweep(
    schemes,
    snr_list_db,
    trials: int,
    seed: int,
    bin_width: float | None = None,
    noise: str = "real",
) -> SweepResult:
    if trials < 1:
        raise ConfigurationError("trials must be positive")
    if seed is None:
        raise ConfigurationError("a seed is required")
    points = []
    for name in schemes:
        name = get_scheme(name).name
        for snr in snr_list_db:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EstimationQualityWarning)
                points.append(conditional_entropy(name, snr, trials, bin_width, point_rng(seed, name, snr), noise))
    cfg = {"schemes": list(schemes), "snr_db": list(map(float, snr_list_db)), "trials": trials, "noise": noise}
    return SweepResult(points, seed, cfg)
