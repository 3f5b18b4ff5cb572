"""Brute-force coset decoders.

The ML rule scores coset ``j`` by ``log sum_l exp(-beta ||y - h c_j^(l)||^2)``
and the MD rule by the distance from the equalized observation to the
nearest point of the coset. Conventional schemes are the ``2^r = 1`` case
of both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
from scipy.special import logsumexp

from .coset import constellation
from .exceptions import ConfigurationError, DecodeError
from .lattice import CosetCodebook, int_to_bits

Concentration = Union[Literal["noise", "paper-literal"], float]

# rows of y per chunk are chosen so a chunk of distances stays around this many entries
_CHUNK_ENTRIES = 1 << 21


@dataclass(frozen=True)
class DecoderConfig:
    """``concentration`` is ``"noise"`` (1/sigma^2), ``"paper-literal"`` (the SNR rho) or a number."""

    mode: Literal["ml", "md"] = "ml"
    concentration: Concentration = "noise"

    def __post_init__(self):
        if self.mode not in ("ml", "md"):
            raise ConfigurationError(f"unknown decoder mode {self.mode!r}")
        c = self.concentration
        if isinstance(c, str):
            if c not in ("noise", "paper-literal"):
                raise ConfigurationError(f"unknown concentration {c!r}")
        elif not (np.isfinite(c) and c > 0):
            raise ConfigurationError("concentration must be a positive number")

    def beta(self, h_hat, sigma2=None):
        """Resolve the exponent scale for a given channel estimate and noise estimate."""
        c = self.concentration
        if not isinstance(c, str):
            return np.broadcast_to(np.float64(c), np.shape(h_hat)).copy()
        if sigma2 is None:
            raise ConfigurationError(f"concentration {c!r} needs a noise variance estimate")
        sigma2 = np.asarray(sigma2, dtype=float)
        if c == "noise":
            return 1.0 / sigma2
        return np.abs(h_hat) ** 2 / sigma2


@dataclass(frozen=True)
class DecodedSecret:
    index: int
    bits: np.ndarray
    per_coset_scores: np.ndarray


def _as_rows(y, codebook: CosetCodebook) -> np.ndarray:
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape[-1] != codebook.L:
        raise DecodeError(f"observation length {y.shape[-1]} does not match L={codebook.L}")
    return y


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DecodeError("non-finite observation or channel estimate")


def squared_distances(Y, h_hat, codebook: CosetCodebook) -> np.ndarray:
    """``||y_n - h_n c||^2`` for every row and every point, shape ``(n, 2^k, 2^r)``."""
    Y = _as_rows(Y, codebook)
    n = len(Y)
    h = np.broadcast_to(np.asarray(h_hat, dtype=np.complex128), (n,))
    _check_finite(Y, h)
    C = constellation(codebook).reshape(-1, codebook.L)
    c_energy = np.sum(np.abs(C) ** 2, axis=1)
    y_energy = np.sum(np.abs(Y) ** 2, axis=1)
    cross = np.conj(Y) @ C.T  # sum_l conj(y_l) c_l
    d = y_energy[:, None] + (np.abs(h) ** 2)[:, None] * c_energy[None, :] - 2.0 * np.real(h[:, None] * cross)
    np.maximum(d, 0.0, out=d)
    return d.reshape(n, 2**codebook.k, 2**codebook.r)


def _chunks(n: int, codebook: CosetCodebook):
    step = max(1, _CHUNK_ENTRIES // (codebook.size * codebook.L))
    for start in range(0, n, step):
        yield slice(start, min(n, start + step))


def ml_scores(Y, h_hat, codebook: CosetCodebook, beta) -> np.ndarray:
    """Per-coset log-likelihood scores (up to a shared constant), shape ``(n, 2^k)``."""
    Y = _as_rows(Y, codebook)
    n = len(Y)
    h = np.broadcast_to(np.asarray(h_hat, dtype=np.complex128), (n,))
    b = np.broadcast_to(np.asarray(beta, dtype=float), (n,))
    if np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise DecodeError("concentration must be positive and finite")
    out = np.empty((n, 2**codebook.k))
    for sl in _chunks(n, codebook):
        d = squared_distances(Y[sl], h[sl], codebook)
        out[sl] = logsumexp(-b[sl, None, None] * d, axis=2)
    return out


def md_scores(Y, h_hat, codebook: CosetCodebook) -> np.ndarray:
    """Negated distance from ``y / h`` to the nearest point of each coset."""
    Y = _as_rows(Y, codebook)
    n = len(Y)
    h = np.broadcast_to(np.asarray(h_hat, dtype=np.complex128), (n,))
    _check_finite(Y, h)
    if np.any(h == 0):
        raise DecodeError("cannot equalize with a zero channel estimate")
    Yeq = Y / h[:, None]
    out = np.empty((n, 2**codebook.k))
    for sl in _chunks(n, codebook):
        out[sl] = -squared_distances(Yeq[sl], 1.0, codebook).min(axis=2)
    return out


def ml_decode_batch(Y, h_hat, codebook: CosetCodebook, beta) -> np.ndarray:
    return np.argmax(ml_scores(Y, h_hat, codebook, beta), axis=1)


def md_decode_batch(Y, h_hat, codebook: CosetCodebook) -> np.ndarray:
    return np.argmax(md_scores(Y, h_hat, codebook), axis=1)


def _decoded(scores: np.ndarray, k: int) -> DecodedSecret:
    j = int(np.argmax(scores))  # first maximum: lowest index wins ties
    return DecodedSecret(j, int_to_bits(j, k), scores)


def ml_decode(y, h_hat, codebook: CosetCodebook, cfg: DecoderConfig | None = None, sigma2=None) -> DecodedSecret:
    """ML coset decision for a single length-L observation.

    Raises:
        DecodeError: on non-finite input.
        ConfigurationError: if the concentration needs ``sigma2`` and none is given.
    """
    cfg = cfg or DecoderConfig()
    _check_finite(np.asarray(y), np.asarray(h_hat))
    beta = cfg.beta(np.asarray(h_hat), sigma2)
    return _decoded(ml_scores(y, h_hat, codebook, beta)[0], codebook.k)


def md_decode(y, h_hat, codebook: CosetCodebook) -> DecodedSecret:
    """Minimum-distance coset decision after equalizing by ``h_hat``."""
    return _decoded(md_scores(y, h_hat, codebook)[0], codebook.k)


def decode_batch(Y, h_hat, codebook: CosetCodebook, cfg: DecoderConfig, sigma2=None) -> np.ndarray:
    """Dispatch on ``cfg.mode``; returns secret indices."""
    if cfg.mode == "md":
        return md_decode_batch(Y, h_hat, codebook)
    n = len(_as_rows(Y, codebook))
    h = np.broadcast_to(np.asarray(h_hat, dtype=np.complex128), (n,))
    s2 = None if sigma2 is None else np.broadcast_to(np.asarray(sigma2, dtype=float), (n,))
    return ml_decode_batch(Y, h, codebook, cfg.beta(h, s2))
