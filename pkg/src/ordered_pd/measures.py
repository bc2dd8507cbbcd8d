"""Finitely supported probability measures with exact rational weights."""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from fractions import Fraction

import numpy as np

from .cone import DEFAULT_TOL, PDMatrix, Tolerances, as_pd
from .exceptions import CapacityError, ValidationError

MAX_DENOMINATOR = 2**63 - 1
TUPLE_CAP = 4096


def as_rational(w) -> Fraction:
    """Convert ``w`` to an exact :class:`~fractions.Fraction`.

    Accepts ints, Fractions and strings such as ``"3/4"``.  Floats are
    rejected because they would smuggle rounding error into the weights.
    """
    if isinstance(w, bool) or isinstance(w, float):
        raise ValidationError(f"weights must be exact rationals, got float {w!r}")
    if isinstance(w, Fraction):
        r = w
    elif isinstance(w, int):
        r = Fraction(w)
    elif isinstance(w, str):
        text = w.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValidationError(f"weight {w!r} is not of the form 'num/den'")
        try:
            r = Fraction(text)
        except ValueError as exc:
            raise ValidationError(f"cannot parse weight {w!r}") from exc
    else:
        raise ValidationError(f"unsupported weight type {type(w).__name__}")
    if r.denominator > MAX_DENOMINATOR:
        raise CapacityError(f"weight denominator {r.denominator} exceeds 2**63 - 1")
    return r


def _find_close(stack: np.ndarray, row: np.ndarray, tol: Tolerances) -> int | None:
    """Index of the first stacked point within ``eig_tol`` (entrywise, relative) of ``row``."""
    scale = np.maximum(np.max(np.abs(stack), axis=1), max(1.0, float(np.max(np.abs(row)))))
    hits = np.flatnonzero(np.max(np.abs(stack - row), axis=1) <= tol.eig_tol * scale)
    return int(hits[0]) if hits.size else None


class DiscreteMeasure:
    """Probability measure ``sum_i w_i delta(x_i)`` on the PD cone.

    Points that agree entrywise up to ``eig_tol`` are merged by summing
    their weights; the first occurrence is kept as representative.  Zero
    weights are dropped.  Point order is first-occurrence order.

    Parameters
    ----------
    points : sequence of PDMatrix or array_like
    weights : sequence of Fraction, int or "num/den" strings
        Must be nonnegative and sum to exactly one.
    """

    __slots__ = ("points", "weights")

    def __init__(self, points: Sequence, weights: Sequence, tol: Tolerances = DEFAULT_TOL):
        points = [as_pd(p) for p in points]
        weights = [as_rational(w) for w in weights]
        if len(points) != len(weights):
            raise ValidationError("points and weights must have the same length")
        if not points:
            raise ValidationError("a measure needs at least one support point")
        dim = points[0].dim
        if any(p.dim != dim for p in points):
            raise ValidationError("all support points must share one dimension")
        if any(w < 0 for w in weights):
            raise ValidationError("weights must be nonnegative")
        if sum(weights) != 1:
            raise ValidationError(f"weights sum to {sum(weights)}, not 1")

        merged_pts: list[PDMatrix] = []
        merged_w: list[Fraction] = []
        index: dict[PDMatrix, int] = {}
        stack = np.empty((len(points), dim * dim))
        for p, w in zip(points, weights):
            if w == 0:
                continue
            k = index.get(p)
            if k is None and merged_pts:
                k = _find_close(stack[: len(merged_pts)], p.data.ravel(), tol)
            if k is None:
                index[p] = len(merged_pts)
                stack[len(merged_pts)] = p.data.ravel()
                merged_pts.append(p)
                merged_w.append(w)
            else:
                index[p] = k
                merged_w[k] += w
        for w in merged_w:
            if w.denominator > MAX_DENOMINATOR:
                raise CapacityError("merged weight denominator exceeds 2**63 - 1")
        self.points: tuple[PDMatrix, ...] = tuple(merged_pts)
        self.weights: tuple[Fraction, ...] = tuple(merged_w)

    @property
    def dim(self) -> int:
        return self.points[0].dim

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.weights))

    def as_dict(self) -> dict:
        return dict(zip(self.points, self.weights))

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(frozenset(self.as_dict().items()))

    def __repr__(self):
        items = ", ".join(f"{p.data.tolist()}: {w}" for p, w in self)
        return f"DiscreteMeasure({{{items}}})"

    def mass(self, indices: Iterable[int]) -> Fraction:
        """Exact mass of the support points with the given indices."""
        return sum((self.weights[i] for i in set(indices)), Fraction(0))

    def denominator_lcm(self) -> int:
        return math.lcm(*(w.denominator for w in self.weights))

    def is_dyadic_uniform(self) -> bool:
        """True when every weight is a multiple of ``1/2**k`` for a common k."""
        n = self.denominator_lcm()
        return n & (n - 1) == 0

    def sorted_support(self) -> list[int]:
        """Support indices in lexicographic order of the matrix entries."""
        return sorted(range(len(self)), key=lambda i: self.points[i].sort_key())


class UniformTuple(tuple):
    """Nonempty tuple of PD matrices, repetitions allowed."""

    def __new__(cls, entries: Iterable):
        entries = tuple(as_pd(e) for e in entries)
        if not entries:
            raise ValidationError("a uniform tuple must be nonempty")
        dim = entries[0].dim
        if any(e.dim != dim for e in entries):
            raise ValidationError("tuple entries must share one dimension")
        return super().__new__(cls, entries)

    @property
    def dim(self) -> int:
        return self[0].dim

    def replicate(self, k: int) -> "UniformTuple":
        """Block replication ``(x_1..x_n, x_1..x_n, ...)`` with ``k`` blocks."""
        if k < 1:
            raise ValidationError("number of blocks must be at least 1")
        return UniformTuple(tuple(self) * k)


class Coupling:
    """Joint rational measure on pairs of support indices.

    Row sums must reproduce ``left.weights`` and column sums
    ``right.weights`` exactly; this is checked at construction.
    """

    __slots__ = ("pairs", "weights", "left", "right")

    def __init__(self, pairs, weights, left: DiscreteMeasure, right: DiscreteMeasure):
        pairs = [(int(i), int(j)) for i, j in pairs]
        weights = [as_rational(w) for w in weights]
        if len(pairs) != len(weights):
            raise ValidationError("pairs and weights must have the same length")
        rows = [Fraction(0)] * len(left)
        cols = [Fraction(0)] * len(right)
        for (i, j), w in zip(pairs, weights):
            if not (0 <= i < len(left) and 0 <= j < len(right)):
                raise ValidationError(f"pair {(i, j)} out of range")
            if w < 0:
                raise ValidationError("coupling weights must be nonnegative")
            rows[i] += w
            cols[j] += w
        if tuple(rows) != left.weights or tuple(cols) != right.weights:
            raise ValidationError("coupling marginals do not reproduce the measures")
        keep = [k for k, w in enumerate(weights) if w != 0]
        self.pairs = tuple(pairs[k] for k in keep)
        self.weights = tuple(weights[k] for k in keep)
        self.left = left
        self.right = right

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(zip(self.pairs, self.weights))

    def row_sums(self) -> tuple[Fraction, ...]:
        rows = [Fraction(0)] * len(self.left)
        for (i, _), w in self:
            rows[i] += w
        return tuple(rows)

    def col_sums(self) -> tuple[Fraction, ...]:
        cols = [Fraction(0)] * len(self.right)
        for (_, j), w in self:
            cols[j] += w
        return tuple(cols)


def dirac(x) -> DiscreteMeasure:
    return DiscreteMeasure([as_pd(x)], [Fraction(1)])


def uniform_of_tuple(t: Sequence) -> DiscreteMeasure:
    """Measure ``(1/n) sum_i delta(t_i)`` induced by a tuple."""
    t = t if isinstance(t, UniformTuple) else UniformTuple(t)
    n = len(t)
    return DiscreteMeasure(list(t), [Fraction(1, n)] * n)


def replicate_to_uniform(m: DiscreteMeasure, cap: int = TUPLE_CAP) -> UniformTuple:
    """Shortest tuple inducing ``m``.

    The tuple has length ``N = lcm`` of the weight denominators; each point
    is repeated ``N * weight`` times, points in lexicographic order.

    Raises
    ------
    CapacityError
        If ``N`` exceeds ``cap``.
    """
    n = m.denominator_lcm()
    if n > cap:
        raise CapacityError(f"replication length {n} exceeds cap {cap}")
    entries = []
    for i in m.sorted_support():
        entries.extend([m.points[i]] * int(m.weights[i] * n))
    return UniformTuple(entries)


def push_forward(f: Callable, m: DiscreteMeasure) -> DiscreteMeasure:
    """Image measure ``f_*(m)``; coinciding images have their weights merged."""
    return DiscreteMeasure([as_pd(f(x)) for x in m.points], list(m.weights))


def mixture(t, m1: DiscreteMeasure, m2: DiscreteMeasure) -> DiscreteMeasure:
    """Convex combination ``(1 - t) m1 + t m2`` with exact weights."""
    t = as_rational(t)
    if not 0 <= t <= 1:
        raise ValidationError(f"mixture parameter must lie in [0, 1], got {t}")
    if m1.dim != m2.dim:
        raise ValidationError("mixture of measures of different dimension")
    points = list(m1.points) + list(m2.points)
    weights = [(1 - t) * w for w in m1.weights] + [t * w for w in m2.weights]
    return DiscreteMeasure(points, weights)


def product_coupling(m1: DiscreteMeasure, m2: DiscreteMeasure) -> Coupling:
    pairs = [(i, j) for i in range(len(m1)) for j in range(len(m2))]
    weights = [m1.weights[i] * m2.weights[j] for i, j in pairs]
    return Coupling(pairs, weights, m1, m2)


def diagonal_coupling(m: DiscreteMeasure) -> Coupling:
    return Coupling([(i, i) for i in range(len(m))], list(m.weights), m, m)
