"""Exact Wasserstein-1 transport between discrete measures under the Thompson metric."""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cone import thompson_dist
from .exceptions import CapacityError, ValidationError
from .measures import Coupling, DiscreteMeasure, UniformTuple

SUPPORT_CAP = 512
ASSIGNMENT_CAP = 256
SCALE_CAP = 2**62


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling together with its Thompson transport cost."""

    coupling: Coupling
    cost: float

    def arcs(self):
        """``(i, j, weight)`` triples sorted by ``(i, j)``."""
        return sorted((i, j, w) for (i, j), w in self.coupling)


def cost_matrix(xs: Sequence, ys: Sequence) -> np.ndarray:
    """Dense matrix of Thompson distances ``d(xs[i], ys[j])``."""
    c = np.empty((len(xs), len(ys)))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            c[i, j] = thompson_dist(x, y)
    return c


def integer_scale(*measures: DiscreteMeasure) -> tuple[int, list[list[int]]]:
    """Common denominator ``L`` and the integer masses ``L * w`` per measure.

    Raises
    ------
    CapacityError
        If ``L`` exceeds ``2**62``.
    """
    scale = math.lcm(*(m.denominator_lcm() for m in measures))
    if scale > SCALE_CAP:
        raise CapacityError(f"common weight denominator {scale} exceeds 2**62; pre-round the weights")
    return scale, [[int(w * scale) for w in m.weights] for m in measures]


def _min_cost_flow(cost: np.ndarray, supply: list[int], demand: list[int]) -> np.ndarray:
    """Successive shortest paths with node potentials on the bipartite network.

    Node 0 is the source, then the ``n1`` supply nodes, the ``n2`` demand
    nodes and finally the sink.  Returns the integer flow on the
    supply-to-demand arcs.
    """
    n1, n2 = cost.shape
    total = sum(supply)
    nv = n1 + n2 + 2
    s, t = 0, nv - 1
    left = slice(1, 1 + n1)
    right = slice(1 + n1, 1 + n1 + n2)

    cap = np.zeros((nv, nv), dtype=np.int64)
    cap[s, left] = supply
    cap[left, right] = total
    cap[right, t] = demand
    w = np.zeros((nv, nv))
    w[left, right] = cost
    w[right, left] = -cost.T

    pi = np.zeros(nv)
    sent = 0
    while sent < total:
        dist = np.full(nv, np.inf)
        prev = np.full(nv, -1, dtype=np.int64)
        done = np.zeros(nv, dtype=bool)
        dist[s] = 0.0
        while True:
            masked = np.where(done, np.inf, dist)
            u = int(np.argmin(masked))
            if not np.isfinite(masked[u]):
                break
            done[u] = True
            if u == t:
                break
            open_ = (cap[u] > 0) & ~done
            reduced = np.maximum(w[u] + pi[u] - pi, 0.0)
            cand = dist[u] + reduced
            better = open_ & (cand < dist)
            dist[better] = cand[better]
            prev[better] = u
        if not np.isfinite(dist[t]):
            raise ValidationError("transport network is infeasible")
        pi += np.where(done, dist, dist[t])

        path = [t]
        while path[-1] != s:
            path.append(int(prev[path[-1]]))
        path.reverse()
        push = min(int(cap[a, b]) for a, b in zip(path, path[1:]))
        push = min(push, total - sent)
        for a, b in zip(path, path[1:]):
            cap[a, b] -= push
            cap[b, a] += push
        sent += push
    return cap[right, left].T.copy()


def wasserstein1(m1: DiscreteMeasure, m2: DiscreteMeasure) -> TransportPlan:
    """Optimal Thompson transport between two discrete measures.

    Weights are scaled to integers by their common denominator so the flow
    problem has integral supplies; arc costs are the Thompson distances.

    Parameters
    ----------
    m1, m2 : DiscreteMeasure
        Measures of the same dimension with at most 512 support points in
        total.

    Returns
    -------
    TransportPlan
        Optimal coupling and its cost ``sum_ij w_ij d(x_i, y_j)``.

    Raises
    ------
    CapacityError
        If the supports are too large or the common denominator overflows.
    """
    if m1.dim != m2.dim:
        raise ValidationError("measures live in different dimensions")
    if len(m1) + len(m2) > SUPPORT_CAP:
        raise CapacityError(f"combined support {len(m1) + len(m2)} exceeds {SUPPORT_CAP}")
    scale, (supply, demand) = integer_scale(m1, m2)
    cost = cost_matrix(m1.points, m2.points)
    flow = _min_cost_flow(cost, supply, demand)
    pairs, weights = [], []
    total = 0.0
    for i in range(len(m1)):
        for j in range(len(m2)):
            f = int(flow[i, j])
            if f:
                pairs.append((i, j))
                weights.append(Fraction(f, scale))
                total += (f / scale) * cost[i, j]
    return TransportPlan(Coupling(pairs, weights, m1, m2), max(total, 0.0))


def w1_distance(m1: DiscreteMeasure, m2: DiscreteMeasure) -> float:
    return wasserstein1(m1, m2).cost


def assignment_uniform(t1: Sequence, t2: Sequence) -> tuple[list[int], float]:
    """Minimum-cost perfect matching between two equal-length tuples.

    Returns ``(perm, cost)`` where ``t1[k]`` is matched to ``t2[perm[k]]`` and
    ``cost`` is the total (not mean) Thompson distance of the matching.
    """
    t1 = t1 if isinstance(t1, UniformTuple) else UniformTuple(t1)
    t2 = t2 if isinstance(t2, UniformTuple) else UniformTuple(t2)
    if len(t1) != len(t2):
        raise ValidationError(f"tuple lengths differ: {len(t1)} vs {len(t2)}")
    if len(t1) > ASSIGNMENT_CAP:
        raise CapacityError(f"tuple length {len(t1)} exceeds {ASSIGNMENT_CAP}")
    cost = cost_matrix(t1, t2)
    rows, cols = linear_sum_assignment(cost)
    perm = [int(c) for _, c in sorted(zip(rows, cols))]
    return perm, float(sum(cost[k, perm[k]] for k in range(len(perm))))


def plan_cost_bound(f: Callable, m: DiscreteMeasure) -> float:
    """Cost ``sum_x w(x) d(x, f(x))`` of moving each atom along ``f``.

    This upper-bounds ``wasserstein1(m, push_forward(f, m)).cost``.
    """
    return float(sum(float(w) * thompson_dist(x, f(x)) for x, w in m))
