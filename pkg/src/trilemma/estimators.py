"""scikit-learn transformers wrapping the decentralization indices.

:class:`DecentralizationIndices` maps each row of ``X`` (one population of
units) to its four indices, so a matrix of daily snapshots can sit inside a
``Pipeline``. :class:`RollingIndex` maps a single daily column to a trailing
window index, keeping row alignment by padding with NaN.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import INDEX_NAMES, check_choice, check_share_vector, check_threshold, check_window
from .decentralization import DEFAULT_THRESHOLD, DEFAULT_WINDOW, compute_index, normalize
from .exceptions import NegativeValue


class DecentralizationIndices(TransformerMixin, BaseEstimator):
    """Row-wise Shannon perplexity, Gini-Simpson, Nakamoto and HHI.

    Parameters
    ----------
    threshold : float, default=0.51
        Share the Nakamoto coefficient has to strictly exceed.
    indices : tuple of str, default=("shannon", "gini", "nakamoto", "hhi")
        Which indices to emit, in output column order.

    Attributes
    ----------
    n_features_in_ : int
        Number of units per row seen during ``fit``.

    Examples
    --------
    >>> DecentralizationIndices().fit_transform([[1, 1, 1, 1], [5, 3, 2, 0]]).round(4)
    array([[4.    , 0.75  , 3.    , 0.25  ],
           [2.8001, 0.62  , 2.    , 0.38  ]])
    """

    def __init__(self, threshold=DEFAULT_THRESHOLD, indices=INDEX_NAMES):
        self.threshold = threshold
        self.indices = indices

    def _validate(self, X):
        X = check_array(X, dtype=np.float64)
        if np.any(X < 0):
            raise NegativeValue("X contains negative values")
        return X

    def fit(self, X, y=None):
        check_threshold(self.threshold)
        for name in self.indices:
            check_choice(name, INDEX_NAMES, "index")
        X = self._validate(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        out = np.empty((X.shape[0], len(self.indices)))
        for i, row in enumerate(X):
            w = normalize(check_share_vector(row))
            out[i] = [compute_index(w, name, self.threshold) for name in self.indices]
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(list(self.indices), dtype=object)


class RollingIndex(TransformerMixin, BaseEstimator):
    """Trailing-window decentralization index of one daily column.

    Row ``t`` of the output holds the index over rows ``t - window + 1``
    through ``t``; rows without a full window, and windows of zeros, are NaN.
    """

    def __init__(self, window=DEFAULT_WINDOW, index="shannon", threshold=DEFAULT_THRESHOLD):
        self.window = window
        self.index = index
        self.threshold = threshold

    def _column(self, X):
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"{type(self).__name__} expects a single column, got {X.shape[1]}")
            X = X[:, 0]
        if np.any(X < 0):
            raise NegativeValue("X contains negative values")
        return X

    def fit(self, X, y=None):
        check_choice(self.index, INDEX_NAMES, "index")
        check_threshold(self.threshold)
        column = self._column(X)
        check_window(self.window, column.size)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        column = self._column(X)
        window = check_window(self.window, column.size)
        out = np.full((column.size, 1), np.nan)
        for end in range(window, column.size + 1):
            chunk = column[end - window:end]
            positive = chunk[chunk > 0]
            if positive.size:
                out[end - 1, 0] = compute_index(normalize(positive), self.index, self.threshold)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray([f"{self.index}_w{self.window}"], dtype=object)
