"""Convergence experiment for the paired order approximation."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .cone import loewner_leq
from .exceptions import OrderedPDError, ValidationError
from .generators import gen_ordered_pair, trial_rng
from .karcher import barycenter
from .order_approx import order_approximate_pair

CONVERGE_COLUMNS = ["trial", "n", "dW_q", "dW_p", "leq_ok", "bary_mono_ok", "error"]


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int = 2
    support_size: int = 4
    trials: int = 3
    seed: int = 0
    n_max: int = 10
    csv_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.dim <= 8:
            raise ValidationError("dim must lie in [1, 8]")
        if not 1 <= self.support_size <= 64:
            raise ValidationError("support size must lie in [1, 64]")
        if self.trials < 0:
            raise ValidationError("trials must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.n_max < 1:
            raise ValidationError("n_max must be at least 1")
        if self.workers < 1:
            raise ValidationError("workers must be at least 1")


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def run_trial(cfg: ExperimentConfig, trial: int) -> list[list[str]]:
    """Rows for one trial; a failure becomes a single error row."""
    rng = trial_rng(cfg.seed, trial)
    rows = []
    try:
        mu, nu = gen_ordered_pair(rng, cfg.dim, cfg.support_size)
        trace = order_approximate_pair(mu, nu, n_max=cfg.n_max)
        for step in trace:
            mono = loewner_leq(barycenter(step.q_n), barycenter(step.p_n))
            rows.append([str(trial), str(step.n), _fmt(step.dw_q), _fmt(step.dw_p),
                         str(step.leq_ok).lower(), str(mono).lower(), ""])
    except (OrderedPDError, AssertionError) as exc:
        rows.append([str(trial), "", "", "", "", "",
                     f"{type(exc).__name__}: {exc}".replace("\n", " ")])
    return rows


def run_converge_experiment(cfg: ExperimentConfig) -> str:
    """Run all trials and return the CSV text (also written to ``cfg.csv_path``)."""
    if cfg.workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_trial = list(pool.map(run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    else:
        per_trial = [run_trial(cfg, t) for t in range(cfg.trials)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGE_COLUMNS)
    for rows in per_trial:
        writer.writerows(rows)
    text = buf.getvalue()
    if cfg.csv_path is not None:
        Path(cfg.csv_path).write_text(text)
    return text
