"""Ordered probability measures on the cone of positive-definite matrices.

Thompson-metric geometry, stochastic order between discrete measures, exact
Wasserstein-1 transport, order-preserving dyadic approximation and the
Karcher barycenter.
"""
from .cone import (
    DEFAULT_TOL,
    OrderInterval,
    PDMatrix,
    SymMatrix,
    Tolerances,
    eig_sym,
    identity,
    in_interval,
    loewner_leq,
    m_ratio,
    order_unit_norm,
    spectral_map,
    thompson_ball,
    thompson_dist,
)
from .estimators import KarcherMean
from .exceptions import CapacityError, ConvergenceError, DomainError, OrderedPDError, ValidationError
from .karcher import (
    KarcherResult,
    SolverConfig,
    barycenter,
    check_contractive,
    check_monotone,
    geometric_mean_2,
    karcher_mean,
)
from .measures import (
    Coupling,
    DiscreteMeasure,
    UniformTuple,
    dirac,
    mixture,
    product_coupling,
    push_forward,
    replicate_to_uniform,
    uniform_of_tuple,
)
from .order_approx import (
    ApproxSchedule,
    ApproxTrace,
    dyadic_lower,
    dyadic_upper,
    interval_cover_reduce,
    order_approximate_pair,
    truncate_lower,
    truncate_upper,
)
from .stochastic_order import (
    OrderCertificate,
    hall_matching,
    stochastic_leq_bruteforce,
    stochastic_leq_flow,
    upper_closure,
)
from .transport import TransportPlan, assignment_uniform, plan_cost_bound, w1_distance, wasserstein1

__version__ = "0.1.0"
