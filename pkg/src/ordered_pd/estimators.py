"""scikit-learn style wrappers around the Karcher solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample_weight, check_spd_array
from .cone import PDMatrix, thompson_dist
from .karcher import SolverConfig, _solve


class KarcherMean(TransformerMixin, BaseEstimator):
    """Weighted Karcher (geometric) mean of a stack of SPD matrices.

    Parameters
    ----------
    tol : float, default=1e-10
        Residual tolerance of the Karcher equation, relative to
        ``1 + ||mean||_F``.
    max_iter : int, default=500
        Maximum number of accepted fixed-point updates.

    Attributes
    ----------
    mean_ : ndarray of shape (n, n)
    residual_ : float
    n_iter_ : int
    n_features_in_ : int
        Matrix dimension ``n`` seen during :meth:`fit`.

    Examples
    --------
    >>> import numpy as np
    >>> KarcherMean().fit(np.array([np.eye(2), 4 * np.eye(2)])).mean_
    array([[2., 0.],
           [0., 2.]])
    """

    def __init__(self, tol=1e-10, max_iter=500):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, sample_weight=None):
        X = check_spd_array(X)
        w = check_sample_weight(sample_weight, len(X))
        res = _solve([PDMatrix(a) for a in X], list(w), SolverConfig(self.tol, self.max_iter))
        self.mean_ = np.array(res.mean.data)
        self.residual_ = res.residual
        self.n_iter_ = res.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Thompson distance of every matrix to the fitted mean, shape (n_matrices, 1)."""
        check_is_fitted(self, "mean_")
        X = check_spd_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_}x{self.n_features_in_} matrices")
        center = PDMatrix(self.mean_)
        return np.array([[thompson_dist(PDMatrix(a), center)] for a in X])
