"""JSON wire formats for matrices, measures, plans and certificates."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cone import PDMatrix, SymMatrix
from .exceptions import ValidationError
from .measures import DiscreteMeasure, as_rational

ASYMMETRY_TOL = 1e-8


def matrix_to_json(m: SymMatrix) -> dict:
    return {"dim": m.dim, "data": [float(v) for v in m.data.ravel()]}


def matrix_from_json(obj, pd: bool = True) -> SymMatrix:
    """Parse ``{"dim": n, "data": [n*n reals, row-major]}``.

    The matrix is symmetrized; input whose asymmetry exceeds ``1e-8``
    relative to its largest entry is rejected.
    """
    if not isinstance(obj, dict) or "dim" not in obj or "data" not in obj:
        raise ValidationError("matrix object needs 'dim' and 'data'")
    n = obj["dim"]
    data = obj["data"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"invalid dim {n!r}")
    if not isinstance(data, list) or len(data) != n * n:
        raise ValidationError(f"'data' must hold {n * n} numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise ValidationError("matrix entries must be numbers")
    arr = np.array(data, dtype=float).reshape(n, n)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix entries must be finite")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > ASYMMETRY_TOL * scale:
        raise ValidationError("matrix is not symmetric")
    return PDMatrix(arr) if pd else SymMatrix(arr)


def rational_to_json(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def measure_to_json(m: DiscreteMeasure) -> dict:
    return {
        "points": [matrix_to_json(p) for p in m.points],
        "weights": [rational_to_json(w) for w in m.weights],
    }


def measure_from_json(obj) -> DiscreteMeasure:
    """Parse ``{"points": [Matrix...], "weights": ["num/den"...]}``.

    Weights must be strings; JSON numbers are rejected so that no float
    rounding enters the exact weights.
    """
    if not isinstance(obj, dict) or "points" not in obj or "weights" not in obj:
        raise ValidationError("measure object needs 'points' and 'weights'")
    weights = obj["weights"]
    if not isinstance(weights, list) or not all(isinstance(w, str) for w in weights):
        raise ValidationError("weights must be a list of 'num/den' strings")
    return DiscreteMeasure([matrix_from_json(p) for p in obj["points"]],
                           [as_rational(w) for w in weights])


def arcs_to_json(coupling) -> list[dict]:
    return [{"i": i, "j": j, "w": rational_to_json(w)} for (i, j), w in sorted(coupling)]


def plan_to_json(plan) -> dict:
    return {"cost": float(plan.cost), "arcs": arcs_to_json(plan.coupling)}


def certificate_to_json(cert) -> dict:
    return {
        "leq": bool(cert.verdict),
        "witness": arcs_to_json(cert.witness) if cert.witness is not None else None,
        "violating_subset": list(cert.violating_subset) if cert.violating_subset is not None else None,
    }


def karcher_result_to_json(result) -> dict:
    return {
        "mean": matrix_to_json(result.mean),
        "residual": float(result.residual),
        "iterations": int(result.iterations),
    }


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
