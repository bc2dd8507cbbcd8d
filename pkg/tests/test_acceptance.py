"""Acceptance criteria, one test per criterion.

Each test prints ``PASS`` or ``FAIL`` with its runtime; the lines are
repeated in the terminal summary so they appear without ``-s`` too.
"""
import contextlib
import time
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

from ordered_pd.cli import main as cli_main
from ordered_pd.cone import PDMatrix, identity, in_interval, loewner_leq, thompson_ball, thompson_dist
from ordered_pd.generators import gen_measure, gen_mixed_pair, gen_ordered_pair, gen_pd, gen_psd_bump, trial_rng
from ordered_pd.karcher import barycenter, check_contractive, check_monotone, karcher_mean
from ordered_pd.measures import DiscreteMeasure, mixture, push_forward, replicate_to_uniform, uniform_of_tuple
from ordered_pd.order_approx import dyadic_lower, dyadic_upper, order_approximate_pair
from ordered_pd.stochastic_order import hall_matching, stochastic_leq_bruteforce, stochastic_leq_flow
from ordered_pd.transport import cost_matrix, plan_cost_bound, w1_distance, wasserstein1

from oracles import transport_vertex_oracle

RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"FAIL criterion {number:2d} {title} ({time.perf_counter() - start:.1f}s): {exc}"
        RESULTS.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} ({elapsed:.1f}s, budget {budget}s)"
    RESULTS.append(line)
    print(line)
    assert ok, f"runtime {elapsed:.1f}s exceeds budget {budget}s"


def rel_err(a, b):
    return np.linalg.norm(a - b) / (1.0 + np.linalg.norm(b))


def assert_residual(res):
    assert res.residual <= 1e-10 * (1.0 + np.linalg.norm(res.mean.data)), res.residual


def test_c01_ball_interval_identity():
    with criterion(1, "ball-interval identity", 5):
        for dim in (1, 2, 3, 4):
            for trial in range(100):
                rng = trial_rng(1001, 100 * dim + trial)
                a, x = gen_pd(rng, dim), gen_pd(rng, dim)
                r = float(rng.uniform(0.05, 4.0))
                assert (thompson_dist(a, x) <= r) == in_interval(x, thompson_ball(a, r)), (dim, trial)


def test_c02_flow_matches_bruteforce():
    with criterion(2, "stochastic order flow == subset oracle", 30):
        verdicts = []
        for trial in range(500):
            rng = trial_rng(1002, trial)
            dim = 1 + trial % 3
            mu, nu = gen_mixed_pair(rng, dim, int(rng.integers(1, 7)), int(rng.integers(1, 7)))
            flow = stochastic_leq_flow(mu, nu).verdict
            assert flow == stochastic_leq_bruteforce(mu, nu), trial
            verdicts.append(flow)
        # both outcomes must be exercised
        assert 0.1 < np.mean(verdicts) < 0.9


def test_c03_hall_matching():
    with criterion(3, "Hall matching", 10):
        verdicts = []
        for trial in range(200):
            rng = trial_rng(1003, trial)
            n = int(rng.integers(1, 7))
            mu, nu = gen_mixed_pair(rng, 1 + trial % 3, n, n)
            t1 = [mu.points[int(rng.integers(len(mu)))] for _ in range(n)]
            t2 = [nu.points[int(rng.integers(len(nu)))] for _ in range(n)]
            sigma = hall_matching(t1, t2)
            verdict = stochastic_leq_flow(uniform_of_tuple(t1), uniform_of_tuple(t2)).verdict
            assert (sigma is not None) == verdict, trial
            if sigma is not None:
                assert sorted(sigma) == list(range(n))
                assert all(loewner_leq(t1[k], t2[sigma[k]]) for k in range(n))
            verdicts.append(verdict)
        assert any(verdicts) and not all(verdicts)


def test_c04_dyadic_lowering():
    with criterion(4, "dyadic lowering contract", 60):
        for eps in (0.2, 0.05):
            for trial in range(200):
                rng = trial_rng(1004, trial)
                dim = 1 + trial % 3
                q = gen_measure(rng, dim, int(rng.integers(1, 9)))
                z = identity(dim).scaled(float(rng.uniform(0.01, 0.09)))
                for out, ordered in ((dyadic_lower(q, z, eps), lambda o: stochastic_leq_flow(o, q)),
                                     (dyadic_upper(q, identity(dim).scaled(50.0), eps),
                                      lambda o: stochastic_leq_flow(q, o))):
                    assert out.is_dyadic_uniform(), (eps, trial)
                    assert ordered(out).verdict, (eps, trial)
                    assert w1_distance(q, out) < eps, (eps, trial)


def test_c05_pipeline():
    with criterion(5, "order-preserving approximation pipeline", 300):
        for trial in range(50):
            rng = trial_rng(1005, trial)
            dim = 1 + trial % 3
            q, p = gen_ordered_pair(rng, dim, int(rng.integers(1, 17)))
            trace = order_approximate_pair(q, p, n_max=40)
            assert len(trace) == 40
            assert all(s.leq_ok for s in trace), trial
            last = trace[-1]
            assert last.n == 40 and last.dw_q < 0.05 and last.dw_p < 0.05, (trial, last.dw_q, last.dw_p)


def test_c06_karcher_closed_forms():
    with criterion(6, "Karcher closed forms", 60):
        for trial in range(200):
            rng = trial_rng(1006, trial)
            dim = 1 + trial % 4
            a, b = gen_pd(rng, dim), gen_pd(rng, dim)
            ah = scipy.linalg.sqrtm(a.data).real
            aih = np.linalg.inv(ah)
            ref = ah @ scipy.linalg.sqrtm(aih @ b.data @ aih).real @ ah
            res = karcher_mean([a, b])
            assert_residual(res)
            assert rel_err(res.mean.data, ref) <= 1e-8, trial

        for trial in range(100):
            rng = trial_rng(2006, trial)
            n = int(rng.integers(1, 7))
            vals = np.exp(rng.uniform(-3.0, 3.0, size=n))
            counts = rng.integers(1, 6, size=n)
            w = [Fraction(int(c), int(counts.sum())) for c in counts]
            res = karcher_mean([PDMatrix([[v]]) for v in vals], w)
            assert_residual(res)
            ref = float(np.exp(sum(float(wi) * np.log(v) for wi, v in zip(w, vals))))
            assert abs(res.mean.data[0, 0] - ref) <= 1e-10 * max(1.0, ref), trial

        for trial in range(100):
            rng = trial_rng(3006, trial)
            n, dim = int(rng.integers(1, 6)), int(rng.integers(2, 5))
            diags = np.exp(rng.uniform(-2.0, 2.0, size=(n, dim)))
            counts = rng.integers(1, 6, size=n)
            w = [Fraction(int(c), int(counts.sum())) for c in counts]
            res = karcher_mean([np.diag(d) for d in diags], w)
            assert_residual(res)
            ref = np.exp(np.array([float(x) for x in w]) @ np.log(diags))
            assert np.max(np.abs(res.mean.data - np.diag(ref))) <= 1e-9 * max(1.0, ref.max()), trial


def test_c07_mean_properties():
    with criterion(7, "Karcher mean properties", 180):
        for trial in range(50):
            rng = trial_rng(1007, trial)
            x = gen_pd(rng, 1 + trial % 4)
            m = karcher_mean([x] * int(rng.integers(1, 6))).mean
            assert rel_err(m.data, x.data) <= 1e-9

            pts = [gen_pd(rng, 3) for _ in range(int(rng.integers(2, 6)))]
            base = karcher_mean(pts).mean.data
            perm = [pts[k] for k in rng.permutation(len(pts))]
            assert rel_err(karcher_mean(perm).mean.data, base) <= 1e-9, trial
            for k in (2, 3):
                assert rel_err(karcher_mean(pts * k).mean.data, base) <= 1e-8, (trial, k)

            meas = gen_measure(rng, 2, int(rng.integers(1, 5)))
            b = barycenter(meas).data
            t = replicate_to_uniform(meas)
            for k in (2, 3):
                assert rel_err(karcher_mean(list(t.replicate(k))).mean.data, b) <= 1e-8, (trial, k)

        for trial in range(200):
            rng = trial_rng(2007, trial)
            n, dim = int(rng.integers(1, 6)), 1 + trial % 3
            a = [gen_pd(rng, dim) for _ in range(n)]
            b = [gen_pd(rng, dim) for _ in range(n)]
            lhs, rhs = check_contractive(a, b)
            assert lhs <= rhs + 1e-8, trial

        for trial in range(200):
            rng = trial_rng(3007, trial)
            n, dim = int(rng.integers(1, 6)), 1 + trial % 3
            a = [gen_pd(rng, dim) for _ in range(n)]
            scale = float(rng.choice([1.0, 1e-2, 1e-4]))
            b = [PDMatrix(x.data + gen_psd_bump(rng, dim, scale)) for x in a]
            assert check_monotone(a, b), trial


def _ordered_pair(strategy, rng, dim):
    size = int(rng.integers(1, 6))
    if strategy == 0:
        return gen_ordered_pair(rng, dim, size)
    if strategy == 1:
        # tiny bumps put nu right next to mu
        return gen_ordered_pair(rng, dim, size, bump_scale=1e-4)
    # unequal supports; keep the first ordered draw
    while True:
        mu, nu = gen_mixed_pair(rng, dim, size, int(rng.integers(1, 6)))
        if stochastic_leq_flow(mu, nu).verdict:
            return mu, nu


def test_c08_barycentric_monotonicity():
    with criterion(8, "barycenter monotone and contractive", 300):
        for trial in range(300):
            rng = trial_rng(1008, trial)
            mu, nu = _ordered_pair(trial % 3, rng, 1 + (trial // 3) % 3)
            bm, bn = barycenter(mu), barycenter(nu)
            assert loewner_leq(bm, bn), trial
            assert thompson_dist(bm, bn) <= w1_distance(mu, nu) + 1e-8, trial


def _dyadic_measure(rng, dim, size):
    counts = rng.integers(1, 5, size=size)
    total = int(counts.sum())
    depth = 1 << (total - 1).bit_length()
    counts[0] += depth - total
    return DiscreteMeasure([gen_pd(rng, dim) for _ in range(size)],
                           [Fraction(int(c), depth) for c in counts])


def test_c09_transport():
    with criterion(9, "transport correctness", 60):
        for trial in range(200):
            rng = trial_rng(1009, trial)
            dim = 1 + trial % 3
            m1 = _dyadic_measure(rng, dim, int(rng.integers(1, 5)))
            m2 = _dyadic_measure(rng, dim, int(rng.integers(1, 5)))
            ref = transport_vertex_oracle(cost_matrix(m1.points, m2.points), m1.weights, m2.weights)
            assert abs(wasserstein1(m1, m2).cost - ref) <= 1e-9, trial

        for trial in range(200):
            rng = trial_rng(2009, trial)
            m1, m2, nu = (gen_measure(rng, 2, int(rng.integers(1, 5))) for _ in range(3))
            t = Fraction(int(rng.integers(0, 17)), 16)
            lhs = w1_distance(mixture(t, m1, m2), nu)
            rhs = (1 - float(t)) * w1_distance(m1, nu) + float(t) * w1_distance(m2, nu)
            assert lhs <= rhs + 1e-9, trial

        for trial in range(200):
            rng = trial_rng(3009, trial)
            m = gen_measure(rng, 2, int(rng.integers(1, 6)))
            targets = [gen_pd(rng, 2) for _ in range(2)]
            images = {x: targets[int(rng.integers(0, 2))] if rng.random() < 0.6 else x for x in m.points}
            f = images.__getitem__
            assert w1_distance(m, push_forward(f, m)) <= plan_cost_bound(f, m) + 1e-12, trial


def test_c10_determinism(tmp_path):
    with criterion(10, "experiment determinism", 120):
        paths = [tmp_path / "run1.csv", tmp_path / "run2.csv"]
        for p in paths:
            assert cli_main(["experiment", "converge", "--seed", "42", "--csv", str(p)]) == 0
        data = [p.read_bytes() for p in paths]
        assert data[0] == data[1]
        assert data[0].count(b"\n") > 1
