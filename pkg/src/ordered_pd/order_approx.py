"""Order-preserving approximation of discrete measures by uniform dyadic ones.

The pipeline for an ordered pair ``q <= p`` at depth ``n``:

1. truncate both measures to the Thompson ball ``[e^-n a, e^n a]``, sending
   outside mass of ``q`` to the bottom corner and of ``p`` to the top
   corner;
2. lower (resp. raise) the weights of the truncations to dyadic rationals,
   parking the removed mass at the next ball's bottom (resp. top) corner.

Every stage is checked against the stochastic order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cone import (
    DEFAULT_TOL,
    OrderInterval,
    PDMatrix,
    Tolerances,
    as_pd,
    identity,
    in_interval,
    loewner_leq,
    thompson_ball,
    thompson_dist,
)
from .exceptions import CapacityError, ValidationError
from .measures import DiscreteMeasure, push_forward
from .stochastic_order import OrderCertificate, stochastic_leq_flow
from .transport import w1_distance

MAX_DYADIC_DEPTH = 40


@dataclass(frozen=True)
class ApproxSchedule:
    """Exhausting sequence of Thompson balls ``A_n = [e^-n a, e^n a]``.

    The base point ``a`` is an order unit; the ball radius at depth ``n``
    is ``r_n = n`` and the comparison constant ``K`` is 1.
    """

    base: PDMatrix
    K: float = 1.0

    @classmethod
    def identity(cls, dim: int) -> "ApproxSchedule":
        return cls(identity(dim))

    def __post_init__(self):
        object.__setattr__(self, "base", as_pd(self.base))

    @property
    def dim(self) -> int:
        return self.base.dim

    def radius(self, n: int) -> float:
        return float(n)

    def interval(self, n: int) -> OrderInterval:
        if n < 1:
            raise ValidationError(f"schedule index must be positive, got {n}")
        return thompson_ball(self.base, self.radius(n))

    def bottom(self, n: int) -> PDMatrix:
        return self.interval(n).lo

    def top(self, n: int) -> PDMatrix:
        return self.interval(n).hi


def _check_dim(m: DiscreteMeasure, sched: ApproxSchedule):
    if m.dim != sched.dim:
        raise ValidationError(f"measure dimension {m.dim} does not match schedule {sched.dim}")


def truncation_map(sched: ApproxSchedule, n: int, direction: str = "lower"):
    """Point map fixing ``A_n`` and sending everything else to a corner of it."""
    iv = sched.interval(n)
    corner = iv.lo if direction == "lower" else iv.hi

    def f(x):
        return x if in_interval(x, iv) else corner

    return f


def truncate_lower(q: DiscreteMeasure, sched: ApproxSchedule, n: int) -> DiscreteMeasure:
    """Move all mass outside ``A_n`` to its bottom corner ``e^-n a``."""
    _check_dim(q, sched)
    return push_forward(truncation_map(sched, n, "lower"), q)


def truncate_upper(p: DiscreteMeasure, sched: ApproxSchedule, n: int) -> DiscreteMeasure:
    """Move all mass outside ``A_n`` to its top corner ``e^n a``."""
    _check_dim(p, sched)
    return push_forward(truncation_map(sched, n, "upper"), p)


def _dyadic(q: DiscreteMeasure, anchor, eps: float, below: bool) -> DiscreteMeasure:
    anchor = as_pd(anchor)
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps!r}")
    if anchor.dim != q.dim:
        raise ValidationError("anchor dimension does not match the measure")
    for x in q.points:
        ok = loewner_leq(anchor, x) if below else loewner_leq(x, anchor)
        if not ok:
            rel = "<=" if below else ">="
            raise ValidationError(f"anchor must satisfy anchor {rel} x for every support point")

    n = len(q)
    bound = max(thompson_dist(x, anchor) for x in q.points)
    if bound == 0.0:
        bound = 1.0
    # largest common depth k with 2^-k <= eps / (n * B)
    threshold = eps / (n * bound)
    depth = 0
    while True:
        denom = 1 << depth
        lowered = [Fraction(math.floor(w * denom), denom) for w in q.weights]
        if all(float(w - r) < threshold for w, r in zip(q.weights, lowered)):
            break
        depth += 1
        if depth > MAX_DYADIC_DEPTH:
            raise CapacityError(f"dyadic depth would exceed 2**{MAX_DYADIC_DEPTH}; eps too small")
    excess = 1 - sum(lowered)
    return DiscreteMeasure(list(q.points) + [anchor], lowered + [excess])


def dyadic_lower(q: DiscreteMeasure, z, eps: float) -> DiscreteMeasure:
    """Uniform dyadic measure ``p <= q`` with ``W1(q, p) < eps``.

    Each weight ``w_i`` is rounded down to ``m_i / 2**k`` for the smallest
    common ``k`` with ``w_i - r_i < eps / (n B)``, where ``B`` bounds the
    distance from the support to ``z``.  The removed mass is placed on
    ``z``, which must lie below every support point.

    Raises
    ------
    ValidationError
        If ``z <= x`` fails for some support point ``x``.
    CapacityError
        If the required depth exceeds 40 binary digits.
    """
    return _dyadic(q, z, eps, below=True)


def dyadic_upper(q: DiscreteMeasure, w, eps: float) -> DiscreteMeasure:
    """Order dual of :func:`dyadic_lower`: result ``>= q``, excess mass on ``w``."""
    return _dyadic(q, w, eps, below=False)


def cover_centers(q: DiscreteMeasure, eps: float) -> list[int]:
    """Greedy cell assignment by Thompson balls of radius ``eps / 4``.

    Support points are scanned in lexicographic order; an uncovered point
    opens a new cell.  Returns, for each support index, the index of its
    cell center.
    """
    r = eps / 4.0
    center_of = [-1] * len(q)
    centers: list[int] = []
    for i in q.sorted_support():
        x = q.points[i]
        for c in centers:
            if thompson_dist(x, q.points[c]) <= r:
                center_of[i] = c
                break
        else:
            centers.append(i)
            center_of[i] = i
    return center_of


def interval_cover_reduce(q: DiscreteMeasure, eps: float, direction: str = "lower") -> DiscreteMeasure:
    """Collapse each cover cell to a corner of its center's ball.

    In the ``"lower"`` direction every point of the cell centred at ``c``
    goes to ``e^{-eps/4} c``, which lies below all cell members and within
    ``eps / 2`` of each; ``"upper"`` uses ``e^{eps/4} c``.
    """
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps!r}")
    if direction not in ("lower", "upper"):
        raise ValidationError(f"direction must be 'lower' or 'upper', got {direction!r}")
    factor = math.exp(-eps / 4.0 if direction == "lower" else eps / 4.0)
    center_of = cover_centers(q, eps)
    images = [q.points[center_of[i]].scaled(factor) for i in range(len(q))]
    return DiscreteMeasure(images, list(q.weights))


@dataclass
class ApproxStep:
    """Record of one depth of :func:`order_approximate_pair`."""

    n: int
    q_n: DiscreteMeasure
    p_n: DiscreteMeasure
    q_trunc: DiscreteMeasure
    p_trunc: DiscreteMeasure
    dw_q: float
    dw_p: float
    dw_q_trunc: float
    dw_p_trunc: float
    eps: float
    certificate: OrderCertificate

    @property
    def leq_ok(self) -> bool:
        return self.certificate.verdict


@dataclass
class ApproxTrace:
    steps: list[ApproxStep] = field(default_factory=list)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, k):
        return self.steps[k]

    def rows(self):
        """``(n, dW_q, dW_p, leq_ok, supp_q, supp_p)`` per step."""
        return [(s.n, s.dw_q, s.dw_p, s.leq_ok, len(s.q_n), len(s.p_n)) for s in self.steps]


def approximate_step(q: DiscreteMeasure, p: DiscreteMeasure, sched: ApproxSchedule, n: int,
                     eps: float | None = None, tol: Tolerances = DEFAULT_TOL) -> ApproxStep:
    """One depth of the paired approximation, with ``eps = 1/n`` by default."""
    eps = 1.0 / n if eps is None else eps
    q_trunc = truncate_lower(q, sched, n)
    p_trunc = truncate_upper(p, sched, n)
    q_n = dyadic_lower(q_trunc, sched.bottom(n + 1), eps)
    p_n = dyadic_upper(p_trunc, sched.top(n + 1), eps)
    cert = stochastic_leq_flow(q_n, p_n, tol)
    return ApproxStep(
        n=n,
        q_n=q_n,
        p_n=p_n,
        q_trunc=q_trunc,
        p_trunc=p_trunc,
        dw_q=w1_distance(q_n, q),
        dw_p=w1_distance(p_n, p),
        dw_q_trunc=w1_distance(q_trunc, q),
        dw_p_trunc=w1_distance(p_trunc, p),
        eps=eps,
        certificate=cert,
    )


def order_approximate_pair(q: DiscreteMeasure, p: DiscreteMeasure, sched: ApproxSchedule | None = None,
                           n_max: int = 40, tol: Tolerances = DEFAULT_TOL) -> ApproxTrace:
    """Approximate an ordered pair ``q <= p`` by uniform dyadic pairs ``q_n <= p_n``.

    Parameters
    ----------
    q, p : DiscreteMeasure
        Must satisfy ``q <= p`` in the stochastic order.
    sched : ApproxSchedule, optional
        Defaults to Thompson balls around the identity.
    n_max : int
        Depths ``1..n_max`` are computed.

    Returns
    -------
    ApproxTrace
        One :class:`ApproxStep` per depth with the approximations, their
        Wasserstein errors and the order certificate of ``q_n <= p_n``.

    Raises
    ------
    ValidationError
        If ``q <= p`` fails, or (with the step index) if a sub-step fails.
    """
    if sched is None:
        sched = ApproxSchedule.identity(q.dim)
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    if not stochastic_leq_flow(q, p, tol).verdict:
        raise ValidationError("order_approximate_pair requires q <= p")
    trace = ApproxTrace()
    for n in range(1, n_max + 1):
        try:
            trace.steps.append(approximate_step(q, p, sched, n, tol=tol))
        except ValidationError as exc:
            raise type(exc)(f"step n={n}: {exc}") from exc
    return trace
