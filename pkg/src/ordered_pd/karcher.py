"""Weighted Karcher mean on the PD cone and the induced barycentric map."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cone import PDMatrix, as_pd, eig_sym, loewner_leq, spectral_map, thompson_dist
from .exceptions import ConvergenceError, ValidationError
from .measures import DiscreteMeasure, as_rational

STEP_FLOOR = 2.0**-20


@dataclass(frozen=True)
class SolverConfig:
    karcher_tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        if not self.karcher_tol > 0:
            raise ValidationError("karcher_tol must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class KarcherResult:
    mean: PDMatrix
    residual: float
    iterations: int


def geometric_mean_2(a, b) -> PDMatrix:
    """Two-point geometric mean ``a^1/2 (a^-1/2 b a^-1/2)^1/2 a^1/2``."""
    a = as_pd(a)
    b = as_pd(b)
    if a.dim != b.dim:
        raise ValidationError("dimension mismatch")
    ah = spectral_map("sqrt", a).data
    aih = spectral_map("inv_sqrt", a).data
    inner = spectral_map("sqrt", aih @ b.data @ aih).data
    return PDMatrix(ah @ inner @ ah)


def _fn(values, vectors, f):
    return (vectors * f(values)) @ vectors.T


def _log_sum(x: np.ndarray, points, weights):
    """Return ``(S, x^1/2)`` with ``S = sum_i w_i log(x^-1/2 A_i x^-1/2)``."""
    w, v = eig_sym(x)
    if w[-1] <= 0:
        raise ConvergenceError("Karcher iterate left the positive cone")
    xh = _fn(w, v, np.sqrt)
    xih = _fn(w, v, lambda t: 1.0 / np.sqrt(t))
    total = np.zeros_like(x)
    for a, wt in zip(points, weights):
        m = xih @ a.data @ xih
        lw, lv = eig_sym((m + m.T) / 2.0)
        total += wt * _fn(lw, lv, np.log)
    return (total + total.T) / 2.0, xh


def _frob(a) -> float:
    return math.sqrt(float(np.sum(a * a)))


def karcher_mean(points: Sequence, weights: Sequence | None = None,
                 cfg: SolverConfig = DEFAULT_CONFIG) -> KarcherResult:
    """Solve ``sum_i w_i log(X^-1/2 A_i X^-1/2) = 0`` for ``X``.

    Damped fixed-point iteration
    ``X <- X^1/2 exp(step * S(X)) X^1/2`` started from the log-Euclidean
    mean ``exp(sum_i w_i log A_i)``.  The step starts at 1, is halved
    whenever a trial update would increase the residual ``||S(X)||_F``, and
    never drops below ``2**-20``.

    Parameters
    ----------
    points : sequence of PDMatrix
    weights : sequence of rationals, optional
        Positive, summing to exactly one.  Uniform when omitted.
    cfg : SolverConfig

    Returns
    -------
    KarcherResult

    Raises
    ------
    ConvergenceError
        If ``max_iter`` accepted updates do not bring the residual below
        ``karcher_tol * (1 + ||X||_F)``.
    """
    points = [as_pd(p) for p in points]
    if not points:
        raise ValidationError("karcher_mean needs at least one point")
    dim = points[0].dim
    if any(p.dim != dim for p in points):
        raise ValidationError("points must share one dimension")
    if weights is None:
        weights = [Fraction(1, len(points))] * len(points)
    weights = [as_rational(w) for w in weights]
    if len(weights) != len(points):
        raise ValidationError("points and weights must have the same length")
    if any(w <= 0 for w in weights) or sum(weights) != 1:
        raise ValidationError("weights must be positive and sum to 1")
    return _solve(points, [float(w) for w in weights], cfg)


def _solve(points: list[PDMatrix], fw: list[float], cfg: SolverConfig) -> KarcherResult:
    if all(p == points[0] for p in points):
        return KarcherResult(points[0], 0.0, 0)

    log_mean = sum(wt * spectral_map("log", p).data for p, wt in zip(points, fw))
    x = spectral_map("exp", log_mean).data
    s, xh = _log_sum(x, points, fw)
    res = _frob(s)
    step = 1.0
    it = 0
    while res > cfg.karcher_tol * (1.0 + _frob(x)):
        if it >= cfg.max_iter:
            raise ConvergenceError(
                f"Karcher iteration did not converge in {cfg.max_iter} iterations "
                f"(residual {res:.3e})",
                residual=res,
                iterations=it,
            )
        while True:
            ew, ev = eig_sym(step * s)
            trial = xh @ _fn(ew, ev, np.exp) @ xh
            trial = (trial + trial.T) / 2.0
            s_new, xh_new = _log_sum(trial, points, fw)
            res_new = _frob(s_new)
            if res_new <= res or step <= STEP_FLOOR:
                break
            step = max(step / 2.0, STEP_FLOOR)
        x, s, xh, res = trial, s_new, xh_new, res_new
        it += 1
    return KarcherResult(PDMatrix(x), res, it)


def barycenter(m: DiscreteMeasure, cfg: SolverConfig = DEFAULT_CONFIG) -> PDMatrix:
    """Karcher barycenter of a discrete measure; ``barycenter(dirac(x)) == x``."""
    return karcher_mean(m.points, m.weights, cfg).mean


def check_contractive(points_a: Sequence, points_b: Sequence,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Both sides of ``d(mean(A), mean(B)) <= (1/n) sum_i d(A_i, B_i)``."""
    if len(points_a) != len(points_b):
        raise ValidationError("sequences must have equal length")
    lhs = thompson_dist(karcher_mean(points_a, cfg=cfg).mean, karcher_mean(points_b, cfg=cfg).mean)
    rhs = sum(thompson_dist(a, b) for a, b in zip(points_a, points_b)) / len(points_a)
    return lhs, rhs


def check_monotone(points_a: Sequence, points_b: Sequence,
                   cfg: SolverConfig = DEFAULT_CONFIG) -> bool:
    """Whether ``a_i <= b_i`` for all ``i`` carries over to the uniform means."""
    if len(points_a) != len(points_b):
        raise ValidationError("sequences must have equal length")
    if not all(loewner_leq(a, b) for a, b in zip(points_a, points_b)):
        raise ValidationError("check_monotone requires a_i <= b_i for every i")
    return loewner_leq(karcher_mean(points_a, cfg=cfg).mean, karcher_mean(points_b, cfg=cfg).mean)
