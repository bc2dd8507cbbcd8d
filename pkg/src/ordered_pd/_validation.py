"""Input validation helpers for array-based entry points."""
from __future__ import annotations

import numpy as np

from .cone import DEFAULT_TOL, MAX_DIM, PDMatrix, Tolerances
from .exceptions import DomainError, ValidationError


def check_spd_array(X, tol: Tolerances = DEFAULT_TOL, sym_tol: float = 1e-8) -> np.ndarray:
    """Validate a stack of SPD matrices.

    Parameters
    ----------
    X : array_like, shape (n_matrices, n, n)
        A single ``(n, n)`` matrix is promoted to a stack of one.

    Returns
    -------
    ndarray, shape (n_matrices, n, n)
        Float copy, symmetrized.

    Raises
    ------
    ValidationError
        On a wrong shape, non-finite entries, or asymmetry above ``sym_tol``.
    DomainError
        If some matrix is not positive definite.
    """
    arr = np.array(X, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
        raise ValidationError(f"expected shape (n_matrices, n, n), got {np.shape(X)}")
    if arr.shape[1] > MAX_DIM:
        raise ValidationError(f"matrix dimension {arr.shape[1]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("input contains non-finite entries")
    asym = np.max(np.abs(arr - np.swapaxes(arr, 1, 2)), axis=(1, 2))
    scale = np.maximum(1.0, np.max(np.abs(arr), axis=(1, 2)))
    if np.any(asym > sym_tol * scale):
        raise ValidationError("input matrices are not symmetric")
    arr = (arr + np.swapaxes(arr, 1, 2)) / 2.0
    for k, a in enumerate(arr):
        try:
            PDMatrix(a, tol)
        except DomainError as exc:
            raise DomainError(f"matrix {k}: {exc}") from exc
    return arr


def check_sample_weight(sample_weight, n: int) -> np.ndarray:
    """Positive weights of length ``n`` normalized to sum one."""
    if sample_weight is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(sample_weight, dtype=float)
    if w.shape != (n,):
        raise ValidationError(f"sample_weight must have shape ({n},)")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError("sample_weight must be finite and positive")
    return w / w.sum()
