"""Seeded random generators for PD matrices and ordered measure pairs.

Every trial draws from its own stream derived from ``(seed, trial)`` so
trials can run in any order or in parallel and still reproduce exactly.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cone import MAX_DIM, PDMatrix
from .exceptions import ValidationError
from .measures import DiscreteMeasure
from .stochastic_order import stochastic_leq_flow


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent generator for one trial of a seeded run."""
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def gen_pd(rng: np.random.Generator, dim: int) -> PDMatrix:
    """``G G^T + 0.1 I`` with ``G`` uniform on ``(-1, 1)`` entrywise."""
    if not 1 <= dim <= MAX_DIM:
        raise ValidationError(f"dim must lie in [1, {MAX_DIM}]")
    g = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return PDMatrix(g @ g.T + 0.1 * np.eye(dim))


def gen_psd_bump(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Random PSD matrix ``scale * h h^T`` of rank at most ``dim``."""
    h = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return scale * (h @ h.T)


def gen_weights(rng: np.random.Generator, size: int, max_count: int = 4) -> list[Fraction]:
    """Exact weights ``c_i / sum(c)`` with integer counts ``c_i`` in ``[1, max_count]``."""
    counts = [int(c) for c in rng.integers(1, max_count + 1, size=size)]
    total = sum(counts)
    return [Fraction(c, total) for c in counts]


def gen_measure(rng: np.random.Generator, dim: int, size: int) -> DiscreteMeasure:
    return DiscreteMeasure([gen_pd(rng, dim) for _ in range(size)], gen_weights(rng, size))


def gen_ordered_pair(rng: np.random.Generator, dim: int, size: int,
                     bump_scale: float = 1.0) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Random pair ``mu <= nu`` with shared weights.

    ``nu``'s i-th point is ``mu``'s i-th point plus a random PSD bump, so
    the diagonal coupling witnesses the order.  The flow decider is run on
    the result before it is returned.
    """
    if size < 1:
        raise ValidationError("support size must be at least 1")
    pts = [gen_pd(rng, dim) for _ in range(size)]
    weights = gen_weights(rng, size)
    bumped = [PDMatrix(p.data + gen_psd_bump(rng, dim, bump_scale)) for p in pts]
    mu = DiscreteMeasure(pts, weights)
    nu = DiscreteMeasure(bumped, weights)
    if not stochastic_leq_flow(mu, nu).verdict:
        raise AssertionError("generated pair failed the stochastic order check")
    return mu, nu


def gen_mixed_pair(rng: np.random.Generator, dim: int, size_mu: int,
                   size_nu: int) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Random pair whose order relation is undetermined in advance.

    Points are positive multiples of one base matrix plus small PSD bumps,
    which makes many of them comparable; the pair is ordered or not with
    comparable frequency.  Used for cross-checking order deciders.
    """
    base = gen_pd(rng, dim)

    def point(lo, hi):
        bump = gen_psd_bump(rng, dim, float(rng.choice([0.0, 0.05])))
        return PDMatrix(float(np.exp(rng.uniform(lo, hi))) * base.data + bump)

    mu = DiscreteMeasure([point(-1.0, 0.5) for _ in range(size_mu)], gen_weights(rng, size_mu))
    nu = DiscreteMeasure([point(-0.5, 1.0) for _ in range(size_nu)], gen_weights(rng, size_nu))
    return mu, nu
