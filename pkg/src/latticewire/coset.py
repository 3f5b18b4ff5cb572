"""Coset encoding and the rotated, energy-normalized PAM mapping.

Each real lattice coordinate ``v`` in ``{0, ..., M-1}`` becomes one complex
baseband symbol ``exp(-i pi/4) (v - (M-1)/2) / sqrt(E_avg)``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigurationError, InvalidPointError
from .lattice import CosetCodebook, bits_to_int

ROTATION = np.exp(-1j * np.pi / 4)


def average_energy(M: int) -> float:
    """Mean energy of the centered PAM set ``{-(M-1)/2, ..., (M-1)/2}``."""
    return (M * M - 1) / 12.0


def coset_encode(secret, rand, codebook: CosetCodebook) -> np.ndarray:
    """Map secret bits and randomness bits to a codebook point.

    The secret (MSB first) picks coset ``C_j``; the randomness picks the
    point of that coset at its lexicographic rank.

    Raises:
        ConfigurationError: if the bit lengths are not ``(k, r)``.
    """
    secret = np.asarray(secret, dtype=np.uint8).ravel()
    rand = np.asarray(rand, dtype=np.uint8).ravel()
    if secret.size != codebook.k or rand.size != codebook.r:
        raise ConfigurationError(
            f"expected {codebook.k} secret and {codebook.r} randomness bits, got {secret.size} and {rand.size}"
        )
    return codebook.cosets[bits_to_int(secret), bits_to_int(rand)].copy()


def encode_indices(secret_idx, rand_idx, codebook: CosetCodebook) -> np.ndarray:
    """Vectorized :func:`coset_encode` on integer indices; returns ``(n, L)`` points."""
    secret_idx = np.asarray(secret_idx, dtype=np.int64)
    rand_idx = np.asarray(rand_idx, dtype=np.int64)
    if np.any((secret_idx < 0) | (secret_idx >= 2**codebook.k)):
        raise ConfigurationError("secret index out of range")
    if np.any((rand_idx < 0) | (rand_idx >= 2**codebook.r)):
        raise ConfigurationError("randomness index out of range")
    return codebook.cosets[secret_idx, rand_idx]


def draw_randomness(n: int, codebook: CosetCodebook, rng: np.random.Generator) -> np.ndarray:
    """Uniform randomness indices in ``[0, 2^r)``."""
    return rng.integers(0, 2**codebook.r, size=n)


def modulate(x, M: int) -> np.ndarray:
    """Rotate, center and scale integer coordinates into unit-energy symbols.

    Raises:
        InvalidPointError: if a coordinate is outside ``{0, ..., M-1}``.
    """
    x = np.asarray(x)
    if np.any((x < 0) | (x > M - 1)) or np.any(np.mod(x, 1) != 0):
        raise InvalidPointError(f"coordinates must be integers in [0, {M - 1}]")
    return ROTATION * (x - (M - 1) / 2.0) / np.sqrt(average_energy(M))


def demodulate_reference(c, M: int) -> np.ndarray:
    """Reference symbols a decoder compares against; same map as :func:`modulate`."""
    return modulate(c, M)


def constellation(codebook: CosetCodebook) -> np.ndarray:
    """Modulated codebook, shape ``(2^k, 2^r, L)``."""
    return modulate(codebook.cosets, codebook.M)


def to_real_axis(symbols, M: int) -> np.ndarray:
    """Inverse of the affine part of :func:`modulate` (no rounding)."""
    return np.sqrt(average_energy(M)) * np.asarray(symbols) / ROTATION + (M - 1) / 2.0


def hard_demap(symbols, M: int) -> np.ndarray:
    """Nearest integer coordinate to each symbol, clipped to the box."""
    v = np.rint(to_real_axis(symbols, M).real)
    return np.clip(v, 0, M - 1).astype(np.int64)
