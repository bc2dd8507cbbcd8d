import csv
import io

import pytest

from ordered_pd.exceptions import ValidationError
from ordered_pd.experiments import CONVERGE_COLUMNS, ExperimentConfig, run_converge_experiment


@pytest.mark.parametrize("kw", [{"dim": 0}, {"support_size": 0}, {"trials": -1}, {"seed": -1},
                                {"n_max": 0}, {"workers": 0}])
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        ExperimentConfig(**kw)


def test_converge_rows_and_determinism():
    cfg = ExperimentConfig(dim=2, support_size=3, trials=2, seed=11, n_max=4)
    text = run_converge_experiment(cfg)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == ",".join(CONVERGE_COLUMNS)
    assert [(r["trial"], r["n"]) for r in rows] == [(str(t), str(n)) for t in range(2) for n in range(1, 5)]
    assert all(r["leq_ok"] == "true" and r["bary_mono_ok"] == "true" and r["error"] == "" for r in rows)
    assert run_converge_experiment(cfg) == text


def test_workers_do_not_change_output():
    cfg = ExperimentConfig(dim=1, support_size=3, trials=3, seed=2, n_max=3)
    par = ExperimentConfig(dim=1, support_size=3, trials=3, seed=2, n_max=3, workers=2)
    assert run_converge_experiment(cfg) == run_converge_experiment(par)
