"""Stochastic order between finitely supported measures on the PD cone.

``mu <= nu`` holds exactly when ``mu(A) <= nu(up(A))`` for every subset
``A`` of the support of ``mu``.  Two deciders are provided: a max-flow
decider that also produces a certificate, and a subset-enumeration decider
that checks the criterion literally and serves as its oracle.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
from networkx.algorithms.flow import preflow_push

from .cone import DEFAULT_TOL, Tolerances, loewner_leq
from .exceptions import CapacityError, ValidationError
from .measures import Coupling, DiscreteMeasure, UniformTuple
from .transport import ASSIGNMENT_CAP, SUPPORT_CAP, integer_scale

BRUTEFORCE_CAP = 20


@dataclass(frozen=True)
class OrderCertificate:
    """Outcome of a stochastic-order test with its evidence.

    ``witness`` is a coupling supported on comparable pairs and is present
    iff ``verdict`` is True; ``violating_subset`` holds left-support indices
    ``A`` with ``mu(A) > nu(up(A))`` and is present iff ``verdict`` is False.
    """

    verdict: bool
    witness: Coupling | None = None
    violating_subset: tuple[int, ...] | None = None

    def __bool__(self):
        return self.verdict


def comparability(xs: Sequence, ys: Sequence, tol: Tolerances = DEFAULT_TOL) -> list[list[int]]:
    """For each ``xs[i]`` the sorted indices ``j`` with ``xs[i] <= ys[j]``."""
    return [[j for j, y in enumerate(ys) if loewner_leq(x, y, tol)] for x in xs]


def upper_closure(subset: Sequence, right_support: Sequence, tol: Tolerances = DEFAULT_TOL) -> list[int]:
    """Indices ``j`` of ``right_support`` lying above some point of ``subset``."""
    return [j for j, y in enumerate(right_support) if any(loewner_leq(x, y, tol) for x in subset)]


def _check_pair(mu: DiscreteMeasure, nu: DiscreteMeasure):
    if mu.dim != nu.dim:
        raise ValidationError("measures live in different dimensions")


def stochastic_leq_flow(mu: DiscreteMeasure, nu: DiscreteMeasure,
                        tol: Tolerances = DEFAULT_TOL) -> OrderCertificate:
    """Decide ``mu <= nu`` by max-flow on the comparability graph.

    The weights are scaled to integers by their common denominator ``L``.
    The order holds iff the maximum flow saturates all ``L`` units; the
    flow is then returned as a coupling supported on comparable pairs.
    Otherwise the source side of a minimum cut gives a subset ``A`` with
    ``mu(A) > nu(up(A))``.

    Raises
    ------
    CapacityError
        If a support exceeds 512 points or the common denominator overflows.
    """
    _check_pair(mu, nu)
    if len(mu) > SUPPORT_CAP or len(nu) > SUPPORT_CAP:
        raise CapacityError(f"support sizes exceed {SUPPORT_CAP}")
    scale, (a, b) = integer_scale(mu, nu)
    adj = comparability(mu.points, nu.points, tol)

    g = nx.DiGraph()
    src, snk = "s", "t"
    g.add_node(src)
    g.add_node(snk)
    for i, cap in enumerate(a):
        g.add_edge(src, ("L", i), capacity=cap)
        for j in adj[i]:
            g.add_edge(("L", i), ("R", j))
    for j, cap in enumerate(b):
        g.add_edge(("R", j), snk, capacity=cap)
    res = preflow_push(g, src, snk)

    if res.graph["flow_value"] == scale:
        pairs, weights = [], []
        for i in range(len(mu)):
            for j in adj[i]:
                f = res[("L", i)][("R", j)]["flow"]
                if f > 0:
                    pairs.append((i, j))
                    weights.append(Fraction(f, scale))
        return OrderCertificate(True, witness=Coupling(pairs, weights, mu, nu))

    seen = {src}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v, attr in res[u].items():
            if v not in seen and attr["flow"] < attr["capacity"]:
                seen.add(v)
                queue.append(v)
    subset = tuple(i for i in range(len(mu)) if ("L", i) in seen)
    up = {j for i in subset for j in adj[i]}
    if not mu.mass(subset) > nu.mass(up):
        raise AssertionError("minimum cut did not yield a violating subset")
    return OrderCertificate(False, violating_subset=subset)


def stochastic_leq_bruteforce(mu: DiscreteMeasure, nu: DiscreteMeasure,
                              tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check ``mu(A) <= nu(up(A))`` over every subset ``A`` of ``supp(mu)``.

    Exponential in ``len(mu)``; limited to 20 support points.
    """
    _check_pair(mu, nu)
    n = len(mu)
    if n > BRUTEFORCE_CAP:
        raise CapacityError(f"brute force limited to {BRUTEFORCE_CAP} support points, got {n}")
    scale, (a, b) = integer_scale(mu, nu)
    up_masks = []
    for x in mu.points:
        mask = 0
        for j, y in enumerate(nu.points):
            if loewner_leq(x, y, tol):
                mask |= 1 << j
        up_masks.append(mask)
    # subset masses and upper-closure masks built incrementally over bitmasks
    mass = [0] * (1 << n)
    ups = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        mass[s] = mass[rest] + a[low]
        ups[s] = ups[rest] | up_masks[low]
        up_mass = sum(b[j] for j in range(len(nu)) if ups[s] >> j & 1)
        if mass[s] > up_mass:
            return False
    return True


def hall_matching(t1: Sequence, t2: Sequence, tol: Tolerances = DEFAULT_TOL) -> list[int] | None:
    """Permutation ``sigma`` with ``t1[k] <= t2[sigma[k]]`` for all ``k``, or None.

    Maximum bipartite matching on the comparability graph by augmenting
    paths; a perfect matching exists iff Hall's condition holds.
    """
    t1 = t1 if isinstance(t1, UniformTuple) else UniformTuple(t1)
    t2 = t2 if isinstance(t2, UniformTuple) else UniformTuple(t2)
    if len(t1) != len(t2):
        raise ValidationError(f"tuple lengths differ: {len(t1)} vs {len(t2)}")
    if len(t1) > ASSIGNMENT_CAP:
        raise CapacityError(f"tuple length {len(t1)} exceeds {ASSIGNMENT_CAP}")
    n = len(t1)
    adj = comparability(t1, t2, tol)
    match_right = [-1] * n

    def augment(i, visited):
        for j in adj[i]:
            if visited[j]:
                continue
            visited[j] = True
            if match_right[j] < 0 or augment(match_right[j], visited):
                match_right[j] = i
                return True
        return False

    for i in range(n):
        # prefer the diagonal so equal tuples give the identity
        if i in adj[i] and match_right[i] < 0:
            match_right[i] = i
    for i in range(n):
        if i in match_right:
            continue
        if not augment(i, [False] * n):
            return None
    sigma = [0] * n
    for j, i in enumerate(match_right):
        sigma[i] = j
    return sigma
