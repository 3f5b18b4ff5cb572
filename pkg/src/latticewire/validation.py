"""Input validation helpers shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigurationError, DecodeError


def check_secret_indices(X, k: int) -> np.ndarray:
    """Accept a 1-D array of indices or an ``(n, k)`` bit matrix; return indices."""
    X = np.asarray(X)
    if X.ndim == 2:
        if X.shape[1] != k:
            raise ConfigurationError(f"bit matrix needs {k} columns, got {X.shape[1]}")
        if not np.isin(X, (0, 1)).all():
            raise ConfigurationError("bit matrix entries must be 0 or 1")
        weights = 1 << np.arange(k - 1, -1, -1)
        return X.astype(np.int64) @ weights
    if X.ndim != 1:
        raise ConfigurationError(f"expected 1-D indices or 2-D bits, got shape {X.shape}")
    if X.size and (np.any(np.mod(X, 1) != 0) or X.min() < 0 or X.max() >= 2**k):
        raise ConfigurationError(f"secret indices must be integers in [0, {2**k})")
    return X.astype(np.int64)


def check_symbols(X, L: int) -> np.ndarray:
    """Complex observations as an ``(n, L)`` array; a 1-D input of length ``n*L`` is reshaped."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 1:
        if X.size % L:
            raise DecodeError(f"{X.size} symbols do not split into length-{L} codewords")
        X = X.reshape(-1, L)
    if X.ndim != 2 or X.shape[1] != L:
        raise DecodeError(f"expected observations of shape (n, {L}), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DecodeError("observations contain non-finite values")
    return X


def check_pilots(X, reference) -> np.ndarray:
    """Received pilot blocks as ``(n_frames, len(reference))``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
    if X.shape[1] != len(reference):
        raise ConfigurationError(f"pilot blocks must have {len(reference)} symbols, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise DecodeError("pilot observations contain non-finite values")
    return X
