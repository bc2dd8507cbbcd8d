"""Spectral calculus, Loewner order and Thompson metric on the PD cone.

Points of the ambient space are :class:`SymMatrix` instances, points of the
open cone are :class:`PDMatrix` instances.  Both are immutable and hashable,
so they can be used as dictionary keys and cached freely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ConvergenceError, DomainError, ValidationError

MAX_DIM = 16
MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    """Numerical slacks used by the order and spectral routines.

    Parameters
    ----------
    pd_tol : float
        Relative eigenvalue threshold of the positive-definiteness check.
    eig_tol : float
        Off-diagonal Frobenius mass, relative to ``||a||_F``, at which the
        Jacobi sweeps stop.  Also the entrywise merge radius for measures.
    order_tol : float
        PSD slack of :func:`loewner_leq`.
    """

    pd_tol: float = 1e-9
    eig_tol: float = 1e-12
    order_tol: float = 1e-9

    def __post_init__(self):
        for name in ("pd_tol", "eig_tol", "order_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-3):
                raise ValidationError(f"{name} must lie in (0, 1e-3), got {value!r}")


DEFAULT_TOL = Tolerances()


class SymMatrix:
    """Immutable real symmetric matrix of dimension at most 16.

    The input is symmetrized as ``(a + a.T) / 2``; callers that need to
    reject asymmetric input should do so before construction (see
    :func:`ordered_pd.io.matrix_from_json`).
    """

    __slots__ = ("_data", "_hash", "_eig")

    def __init__(self, data):
        if isinstance(data, SymMatrix):
            arr = data._data
        else:
            arr = np.array(data, dtype=float)
            if arr.ndim == 0:
                arr = arr.reshape(1, 1)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
                raise ValidationError(f"expected a non-empty square matrix, got shape {arr.shape}")
            if arr.shape[0] > MAX_DIM:
                raise ValidationError(f"dimension {arr.shape[0]} exceeds cap {MAX_DIM}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError("matrix entries must be finite")
            arr = (arr + arr.T) / 2.0
            if not np.array_equal(arr, arr.T):
                raise ValidationError("symmetrization failed")
            arr.setflags(write=False)
        self._data = arr
        self._hash = hash((arr.shape[0], arr.tobytes()))
        self._eig = None

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Read-only ``(dim, dim)`` array of entries."""
        return self._data

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy()
        return self._data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self._hash == other._hash and np.array_equal(self._data, other._data)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self._data.tolist()!r})"

    def sort_key(self) -> tuple:
        """Lexicographic key on the row-major entries."""
        return tuple(self._data.ravel().tolist())

    def eig(self):
        """Cached ``(eigenvalues, eigenvectors)`` from :func:`eig_sym`."""
        if self._eig is None:
            self._eig = eig_sym(self)
        return self._eig

    def scaled(self, factor: float) -> "SymMatrix":
        return type(self)(factor * self._data)


class PDMatrix(SymMatrix):
    """Symmetric positive-definite matrix (a point of the open cone)."""

    __slots__ = ()

    def __init__(self, data, tol: Tolerances = DEFAULT_TOL):
        super().__init__(data)
        if type(data) is PDMatrix:
            self._eig = data._eig
            return
        w, _ = self.eig()
        top = max(abs(w[0]), abs(w[-1]))
        if not (w[-1] > 0.0 and w[-1] > tol.pd_tol * top):
            raise DomainError(
                f"matrix is not positive definite: min eigenvalue {w[-1]:.3e}, "
                f"spectral norm {top:.3e}"
            )


def as_sym(x) -> SymMatrix:
    return x if isinstance(x, SymMatrix) else SymMatrix(x)


def as_pd(x) -> PDMatrix:
    return x if isinstance(x, PDMatrix) else PDMatrix(x)


def identity(dim: int) -> PDMatrix:
    return PDMatrix(np.eye(dim))


def _check_same_dim(x: SymMatrix, y: SymMatrix):
    if x.dim != y.dim:
        raise ValidationError(f"dimension mismatch: {x.dim} vs {y.dim}")


def _jacobi(a: np.ndarray, tol: float):
    n = a.shape[0]
    m = a.tolist()
    scale = math.sqrt(sum(x * x for row in m for x in row))
    if n == 1 or scale == 0.0:
        return np.array([m[i][i] for i in range(n)]), np.eye(n)
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    limit = tol * scale
    for _ in range(MAX_SWEEPS):
        off = math.sqrt(2.0 * sum(m[p][q] ** 2 for p in range(n - 1) for q in range(p + 1, n)))
        if off <= limit:
            return np.array([m[i][i] for i in range(n)]), np.array(v)
        for p in range(n - 1):
            mp = m[p]
            for q in range(p + 1, n):
                apq = mp[q]
                if apq == 0.0:
                    continue
                mq = m[q]
                theta = (mq[q] - mp[p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    mk = m[k]
                    akp = mk[p]
                    akq = mk[q]
                    mk[p] = c * akp - s * akq
                    mk[q] = s * akp + c * akq
                for k in range(n):
                    apk = mp[k]
                    aqk = mq[k]
                    mp[k] = c * apk - s * aqk
                    mq[k] = s * apk + c * aqk
                mp[q] = mq[p] = 0.0
                for row in v:
                    vp = row[p]
                    vq = row[q]
                    row[p] = c * vp - s * vq
                    row[q] = s * vp + c * vq
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")


def eig_sym(a, tol: Tolerances = DEFAULT_TOL):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : SymMatrix or array_like
        Symmetric matrix.
    tol : Tolerances
        ``tol.eig_tol`` is the relative off-diagonal stopping threshold.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Sorted in descending order.
    eigenvectors : ndarray, shape (n, n)
        Orthogonal matrix whose columns match ``eigenvalues``.

    Raises
    ------
    ConvergenceError
        If the off-diagonal mass is still above threshold after 100 sweeps.
    """
    arr = a.data if isinstance(a, SymMatrix) else as_sym(a).data
    w, v = _jacobi(arr, tol.eig_tol)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


_SPECTRAL_FUNCS = {
    "sqrt": np.sqrt,
    "inv_sqrt": lambda w: 1.0 / np.sqrt(w),
    "log": np.log,
    "exp": np.exp,
}
_NEEDS_PD = {"sqrt", "inv_sqrt", "log"}


def _apply(w, v, values) -> np.ndarray:
    return (v * values) @ v.T


def spectral_map(f: str, a) -> SymMatrix:
    """Apply a scalar function to the spectrum of a symmetric matrix.

    ``f`` is one of ``"sqrt"``, ``"inv_sqrt"``, ``"log"``, ``"exp"``.  The
    first three require a positive-definite argument and raise
    :class:`DomainError` otherwise.  Results that are positive definite by
    construction (everything except ``log``) come back as :class:`PDMatrix`.
    """
    if f not in _SPECTRAL_FUNCS:
        raise ValidationError(f"unknown spectral function {f!r}")
    if f in _NEEDS_PD:
        a = as_pd(a)
    else:
        a = as_sym(a)
    w, v = a.eig()
    out = _apply(w, v, _SPECTRAL_FUNCS[f](w))
    if f == "log":
        return SymMatrix(out)
    try:
        return PDMatrix(out)
    except DomainError:
        # exp of a matrix with a huge eigenvalue spread underflows
        return SymMatrix(out)


def _inv_sqrt(y: PDMatrix) -> np.ndarray:
    w, v = y.eig()
    return _apply(w, v, 1.0 / np.sqrt(w))


def _congruence_eigs(x: PDMatrix, y: PDMatrix) -> np.ndarray:
    """Eigenvalues of ``y^{-1/2} x y^{-1/2}``, descending."""
    s = _inv_sqrt(y)
    m = s @ x.data @ s
    w, _ = _jacobi((m + m.T) / 2.0, DEFAULT_TOL.eig_tol)
    return np.sort(w)[::-1]


def loewner_leq(x, y, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Return True when ``y - x`` is positive semidefinite up to ``order_tol``.

    The slack is ``order_tol * max(1, ||y - x||_F)`` on the smallest
    eigenvalue of the difference.
    """
    x = as_sym(x)
    y = as_sym(y)
    _check_same_dim(x, y)
    if x == y:
        return True
    return _loewner_cached(x, y, tol)


@lru_cache(maxsize=1 << 16)
def _loewner_cached(x: SymMatrix, y: SymMatrix, tol: Tolerances) -> bool:
    d = y.data - x.data
    if x.dim == 1:
        lam = d[0, 0]
        return bool(lam >= -tol.order_tol * max(1.0, abs(lam)))
    fro = math.sqrt(float(np.sum(d * d)))
    w, _ = _jacobi(d, tol.eig_tol)
    return bool(w.min() >= -tol.order_tol * max(1.0, fro))


def m_ratio(x, y) -> float:
    """Smallest ``lam > 0`` with ``x <= lam * y``.

    Computed as the largest eigenvalue of ``y^{-1/2} x y^{-1/2}``.
    """
    x = as_pd(x)
    y = as_pd(y)
    _check_same_dim(x, y)
    if x.dim == 1:
        return float(x.data[0, 0] / y.data[0, 0])
    return float(_congruence_eigs(x, y)[0])


@lru_cache(maxsize=1 << 16)
def _thompson_cached(x: PDMatrix, y: PDMatrix) -> float:
    if x.dim == 1:
        return abs(math.log(x.data[0, 0]) - math.log(y.data[0, 0]))
    w = _congruence_eigs(x, y)
    return max(math.log(w[0]), -math.log(w[-1]), 0.0)


def thompson_dist(x, y) -> float:
    """Thompson part metric ``max(log M(x/y), log M(y/x))``.

    The pair is put in a canonical order before evaluation, so the result is
    bitwise symmetric in its arguments.
    """
    x = as_pd(x)
    y = as_pd(y)
    _check_same_dim(x, y)
    if x == y:
        return 0.0
    if y.sort_key() < x.sort_key():
        x, y = y, x
    return _thompson_cached(x, y)


@dataclass(frozen=True)
class OrderInterval:
    """Closed order interval ``[lo, hi]`` in the Loewner order."""

    lo: PDMatrix
    hi: PDMatrix

    def __post_init__(self):
        object.__setattr__(self, "lo", as_pd(self.lo))
        object.__setattr__(self, "hi", as_pd(self.hi))
        _check_same_dim(self.lo, self.hi)
        if not loewner_leq(self.lo, self.hi):
            raise ValidationError("order interval requires lo <= hi")

    @property
    def dim(self) -> int:
        return self.lo.dim

    def __contains__(self, x) -> bool:
        return in_interval(x, self)


def thompson_ball(a, r: float) -> OrderInterval:
    """Closed Thompson ball of radius ``r`` around ``a`` as ``[e^-r a, e^r a]``."""
    a = as_pd(a)
    if not r > 0:
        raise ValidationError(f"radius must be positive, got {r!r}")
    return OrderInterval(a.scaled(math.exp(-r)), a.scaled(math.exp(r)))


def in_interval(x, iv: OrderInterval, tol: Tolerances = DEFAULT_TOL) -> bool:
    x = as_sym(x)
    _check_same_dim(x, iv.lo)
    return loewner_leq(iv.lo, x, tol) and loewner_leq(x, iv.hi, tol)


def order_unit_norm(x, a) -> float:
    """Order-unit norm ``inf{lam > 0 : -lam a <= x <= lam a}``.

    Equals the spectral radius of ``a^{-1/2} x a^{-1/2}``.
    """
    x = as_sym(x)
    a = as_pd(a)
    _check_same_dim(x, a)
    s = _inv_sqrt(a)
    m = s @ x.data @ s
    w, _ = _jacobi((m + m.T) / 2.0, DEFAULT_TOL.eig_tol)
    return float(np.max(np.abs(w)))
