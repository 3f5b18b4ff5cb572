"""scikit-learn style wrappers around the encoder, decoder and entropy estimator.

These follow the estimator conventions (constructor stores parameters only,
``fit`` returns ``self``, fitted attributes end in ``_``) so they work with
``get_params``/``set_params``, ``clone`` and grid utilities.
"""

from __future__ import annotations

import numpy as np
from scipy.special import softmax
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .coset import encode_indices, modulate
from .decode import DecoderConfig, md_scores, ml_scores
from .lattice import get_scheme
from .metrics import plugin_conditional_entropy
from .phy import barker_pilot
from .validation import check_pilots, check_secret_indices, check_symbols


class CosetEncoder(TransformerMixin, BaseEstimator):
    """Map secret indices to modulated codewords of a preset scheme.

    ``transform`` returns complex symbols of shape ``(n, L)``; the random
    coset member is drawn from ``random_state``.
    """

    def __init__(self, scheme="coset-d2", random_state=None):
        self.scheme = scheme
        self.random_state = random_state

    def fit(self, X=None, y=None):
        s = get_scheme(self.scheme)
        self.scheme_ = s
        self.codebook_ = s.codebook()
        self.n_features_out_ = s.L
        self._rng = check_random_state(self.random_state)
        return self

    def encode_points(self, X):
        check_is_fitted(self, "codebook_")
        idx = check_secret_indices(X, self.codebook_.k)
        rand = self._rng.randint(0, 2**self.codebook_.r, size=idx.size)
        return encode_indices(idx, rand, self.codebook_)

    def transform(self, X):
        return modulate(self.encode_points(X), self.codebook_.M)


class CosetDecoder(ClassifierMixin, BaseEstimator):
    """ML or MD coset decoder with a pilot-fitted channel.

    ``fit`` takes received pilot blocks (one row per frame, or a single
    block) and estimates the channel gain and noise variance by least
    squares against the known pilots; ``predict`` then decodes codeword
    observations of shape ``(n, L)``.
    """

    def __init__(self, scheme="coset-d2", mode="ml", concentration="noise", pilots=None):
        self.scheme = scheme
        self.mode = mode
        self.concentration = concentration
        self.pilots = pilots

    def fit(self, X, y=None):
        s = get_scheme(self.scheme)
        self.config_ = DecoderConfig(self.mode, self.concentration)
        ref = barker_pilot() if self.pilots is None else np.asarray(self.pilots, dtype=np.complex128)
        P = check_pilots(X, ref)
        energy = np.vdot(ref, ref).real
        h = P @ np.conj(ref) / energy
        resid = P - h[:, None] * ref[None, :]
        dof = P.size - P.shape[0]
        self.h_hat_ = complex(np.mean(h))
        self.sigma2_hat_ = float(max(np.sum(np.abs(resid) ** 2) / max(dof, 1), 1e-12 * abs(self.h_hat_) ** 2))
        self.codebook_ = s.codebook()
        self.classes_ = np.arange(2**self.codebook_.k)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "codebook_")
        Y = check_symbols(X, self.codebook_.L)
        if self.config_.mode == "md":
            return md_scores(Y, self.h_hat_, self.codebook_)
        beta = self.config_.beta(np.asarray(self.h_hat_), self.sigma2_hat_)
        return ml_scores(Y, self.h_hat_, self.codebook_, beta)

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]

    def predict_proba(self, X):
        """Posterior coset probabilities (ML mode only)."""
        if self.mode != "ml":
            raise AttributeError("predict_proba is only available in ML mode")
        return softmax(self.decision_function(X), axis=1)


class BinnedEntropyEstimator(BaseEstimator):
    """Plug-in ``H(s | y)`` over a grid of width ``bin_width`` on real observations.

    ``fit(X, y)`` takes projected real observations ``X`` (``(n,)`` or
    ``(n, L)``) and secret labels ``y``; the estimate is stored in
    ``h_cond_``. ``score`` returns the estimate on new data.
    """

    def __init__(self, bin_width=0.01, n_labels=None):
        self.bin_width = bin_width
        self.n_labels = n_labels

    def _estimate(self, X, y):
        if not self.bin_width or self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64).ravel()
        if X.shape[0] != y.size:
            raise ValueError("X and y have different numbers of samples")
        n_labels = self.n_labels or int(y.max()) + 1
        bins = np.floor(X / self.bin_width).astype(np.int64)
        if bins.ndim == 2 and bins.shape[1] == 1:
            bins = bins[:, 0]
        return plugin_conditional_entropy(bins, y, n_labels)

    def fit(self, X, y):
        self.h_cond_, self.occupied_bins_ = self._estimate(X, y)
        return self

    def score(self, X, y):
        return self._estimate(X, y)[0]
