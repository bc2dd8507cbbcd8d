"""Command-line interface: ``ordered-pd <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input and 3 when a solver fails
to converge.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import io
from .cone import m_ratio, thompson_dist
from .exceptions import ConvergenceError, ValidationError
from .experiments import ExperimentConfig, run_converge_experiment
from .karcher import SolverConfig, karcher_mean
from .order_approx import ApproxSchedule, approximate_step
from .stochastic_order import stochastic_leq_bruteforce, stochastic_leq_flow
from .transport import wasserstein1

log = logging.getLogger("ordered_pd")

EXIT_INPUT = 2
EXIT_CONVERGENCE = 3
TRACE_COLUMNS = ["n", "dW_q", "dW_p", "leq_ok", "supp_q", "supp_p"]


def _emit(obj):
    sys.stdout.write(io.dump_json(obj))


def cmd_thompson(args):
    a = io.matrix_from_json(io.load_json(args.a))
    b = io.matrix_from_json(io.load_json(args.b))
    _emit({"distance": thompson_dist(a, b), "M_a_b": m_ratio(a, b), "M_b_a": m_ratio(b, a)})


def cmd_order_check(args):
    mu = io.measure_from_json(io.load_json(args.mu))
    nu = io.measure_from_json(io.load_json(args.nu))
    if args.method == "brute":
        _emit({"leq": stochastic_leq_bruteforce(mu, nu), "witness": None, "violating_subset": None})
    else:
        _emit(io.certificate_to_json(stochastic_leq_flow(mu, nu)))


def cmd_wasserstein(args):
    mu = io.measure_from_json(io.load_json(args.mu))
    nu = io.measure_from_json(io.load_json(args.nu))
    _emit(io.plan_to_json(wasserstein1(mu, nu)))


def cmd_karcher(args):
    m = io.measure_from_json(io.load_json(args.measure))
    cfg = SolverConfig(karcher_tol=args.tol) if args.tol is not None else SolverConfig()
    _emit(io.karcher_result_to_json(karcher_mean(m.points, m.weights, cfg)))


def cmd_approx_pair(args):
    q = io.measure_from_json(io.load_json(args.mu))
    p = io.measure_from_json(io.load_json(args.nu))
    if args.nmax < 1:
        raise ValidationError("--nmax must be at least 1")
    if not stochastic_leq_flow(q, p).verdict:
        raise ValidationError("approx-pair requires mu <= nu in the stochastic order")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sched = ApproxSchedule.identity(q.dim)
    with open(out / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for n in range(1, args.nmax + 1):
            step = approximate_step(q, p, sched, n)
            certs = {
                "q_n<=q_trunc": stochastic_leq_flow(step.q_n, step.q_trunc),
                "q_trunc<=p_trunc": stochastic_leq_flow(step.q_trunc, step.p_trunc),
                "p_trunc<=p_n": stochastic_leq_flow(step.p_trunc, step.p_n),
                "q_n<=p_n": step.certificate,
            }
            io.dump_json({
                "n": n,
                "eps": step.eps,
                "q_n": io.measure_to_json(step.q_n),
                "p_n": io.measure_to_json(step.p_n),
                "dW_q": step.dw_q,
                "dW_p": step.dw_p,
                "certificates": {k: io.certificate_to_json(c) for k, c in certs.items()},
            }, out / f"step_{n:03d}.json")
            writer.writerow([n, f"{step.dw_q:.15g}", f"{step.dw_p:.15g}", str(step.leq_ok).lower(),
                             len(step.q_n), len(step.p_n)])
            log.info("n=%d dW_q=%.3g dW_p=%.3g leq=%s", n, step.dw_q, step.dw_p, step.leq_ok)


def cmd_experiment(args):
    cfg = ExperimentConfig(dim=args.dim, support_size=args.size, trials=args.trials, seed=args.seed,
                           n_max=args.nmax, csv_path=args.csv, workers=args.workers)
    text = run_converge_experiment(cfg)
    if args.csv is None:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordered-pd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thompson", help="Thompson distance between two matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_thompson)

    p = sub.add_parser("order-check", help="decide mu <= nu in the stochastic order")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--method", choices=["flow", "brute"], default="flow")
    p.set_defaults(func=cmd_order_check)

    p = sub.add_parser("wasserstein", help="optimal Thompson transport plan")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.set_defaults(func=cmd_wasserstein)

    for name in ("karcher", "barycenter"):
        p = sub.add_parser(name, help="Karcher barycenter of a measure")
        p.add_argument("--measure", required=True)
        if name == "karcher":
            p.add_argument("--tol", type=float, default=None)
        else:
            p.set_defaults(tol=None)
        p.set_defaults(func=cmd_karcher)

    p = sub.add_parser("approx-pair", help="order-preserving dyadic approximation of mu <= nu")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_approx_pair)

    p = sub.add_parser("experiment", help="seeded experiments")
    esub = p.add_subparsers(dest="experiment", required=True)
    e = esub.add_parser("converge", help="convergence of the paired approximation")
    e.add_argument("--dim", type=int, default=2)
    e.add_argument("--size", type=int, default=4)
    e.add_argument("--trials", type=int, default=3)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--nmax", type=int, default=10)
    e.add_argument("--csv", default=None)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
