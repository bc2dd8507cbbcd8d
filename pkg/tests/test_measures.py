from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordered_pd.exceptions import CapacityError, ValidationError
from ordered_pd.measures import (
    Coupling,
    DiscreteMeasure,
    UniformTuple,
    as_rational,
    dirac,
    mixture,
    product_coupling,
    push_forward,
    replicate_to_uniform,
    uniform_of_tuple,
)

from conftest import scalar

X, Y, Z = scalar(1.0), scalar(2.0), scalar(5.0)


def test_as_rational():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational(1) == 1
    for bad in (0.5, "0.5", "1e-3", "abc", None):
        with pytest.raises(ValidationError):
            as_rational(bad)
    with pytest.raises(CapacityError):
        as_rational(Fraction(1, 2**64))


def test_measure_validation():
    with pytest.raises(ValidationError):
        DiscreteMeasure([X, Y], ["1/2", "1/3"])
    with pytest.raises(ValidationError):
        DiscreteMeasure([X, Y], ["3/2", "-1/2"])
    with pytest.raises(ValidationError):
        DiscreteMeasure([], [])
    with pytest.raises(ValidationError):
        DiscreteMeasure([X, np.eye(2)], ["1/2", "1/2"])


def test_duplicates_merge():
    m = DiscreteMeasure([X, Y, scalar(1.0 + 1e-14)], ["1/4", "1/2", "1/4"])
    assert len(m) == 2
    assert m.as_dict() == {X: Fraction(1, 2), Y: Fraction(1, 2)}


def test_dirac():
    m = dirac(X)
    assert m.points == (X,) and m.weights == (1,)
    assert dirac(X) == uniform_of_tuple([X])


def test_uniform_of_tuple():
    assert uniform_of_tuple([X, Y]).as_dict() == {X: Fraction(1, 2), Y: Fraction(1, 2)}
    assert uniform_of_tuple([X, X, X, Y]).as_dict() == {X: Fraction(3, 4), Y: Fraction(1, 4)}
    t = UniformTuple([X, Y, Y])
    assert uniform_of_tuple(t) == uniform_of_tuple(t.replicate(2))
    assert uniform_of_tuple(t) == uniform_of_tuple([Y, X, Y])


def test_replicate_to_uniform():
    assert replicate_to_uniform(DiscreteMeasure([Y, X], ["1/2", "1/2"])) == (X, Y)
    assert replicate_to_uniform(DiscreteMeasure([X, Y], ["3/4", "1/4"])) == (X, X, X, Y)
    assert replicate_to_uniform(dirac(X)) == (X,)
    with pytest.raises(CapacityError):
        replicate_to_uniform(DiscreteMeasure([X, Y], ["1/4097", "4096/4097"]))


def test_push_forward():
    m = DiscreteMeasure([X, Y], ["1/2", "1/2"])
    assert push_forward(lambda x: x, m) == m
    assert push_forward(lambda x: Z, m) == dirac(Z)
    assert push_forward(lambda x: Z, m).as_dict() == {Z: 1}


def test_mixture():
    m1, m2 = dirac(X), dirac(Y)
    assert mixture(0, m1, m2) == m1
    assert mixture("1/2", m1, m2).as_dict() == {X: Fraction(1, 2), Y: Fraction(1, 2)}
    m3 = DiscreteMeasure([X, Y], ["1/2", "1/2"])
    assert mixture("1/4", dirac(X), m3).as_dict() == {X: Fraction(7, 8), Y: Fraction(1, 8)}
    with pytest.raises(ValidationError):
        mixture("3/2", m1, m2)


def test_product_coupling():
    c = product_coupling(dirac(X), dirac(Y))
    assert list(c) == [((0, 0), 1)]
    u = DiscreteMeasure([X, Y], ["1/2", "1/2"])
    c = product_coupling(u, u)
    assert len(c) == 4 and set(c.weights) == {Fraction(1, 4)}
    assert c.row_sums() == u.weights and c.col_sums() == u.weights


def test_coupling_rejects_wrong_marginals():
    u = DiscreteMeasure([X, Y], ["1/2", "1/2"])
    with pytest.raises(ValidationError):
        Coupling([(0, 0)], [1], u, u)


points = st.sampled_from([scalar(v) for v in (0.5, 1.0, 2.0, 3.0, 7.0)])
weights = st.lists(st.integers(1, 9), min_size=1, max_size=5)


@st.composite
def measures(draw):
    counts = draw(weights)
    pts = draw(st.lists(points, min_size=len(counts), max_size=len(counts)))
    total = sum(counts)
    return DiscreteMeasure(pts, [Fraction(c, total) for c in counts])


@settings(max_examples=100, deadline=None)
@given(measures(), measures(), st.fractions(0, 1, max_denominator=12), st.integers(0, 4))
def test_mass_stays_exactly_one(m1, m2, t, shift):
    m = mixture(t, m1, m2)
    m = push_forward(lambda x: scalar(x.data[0, 0] + shift), m)
    assert sum(m.weights) == 1
    assert all(w > 0 for w in m.weights)


@settings(max_examples=100, deadline=None)
@given(measures())
def test_replication_fixed_point(m):
    assert uniform_of_tuple(replicate_to_uniform(m)) == m


@settings(max_examples=50, deadline=None)
@given(measures(), measures())
def test_product_coupling_marginals(m1, m2):
    c = product_coupling(m1, m2)
    assert c.row_sums() == m1.weights and c.col_sums() == m2.weights


@settings(max_examples=50, deadline=None)
@given(measures(), st.integers(1, 3))
def test_support_of_push_forward(m, k):
    f = lambda x: scalar(min(x.data[0, 0], float(k)))  # noqa: E731
    assert set(push_forward(f, m).points) == {f(x) for x in m.points}
