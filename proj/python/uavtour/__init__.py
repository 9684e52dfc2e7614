"""Multi-return UAV data-collection tour planner.

Thin convenience layer over the native module: every function that takes an
instance accepts either the JSON text produced by :func:`generate` /
``uavtour gen`` or the equivalent ``dict``.
"""

import json as _json

from . import _uavtour as _native
from ._uavtour import SolverError, StructuralError

__all__ = [
    "SolverError",
    "StructuralError",
    "evaluate",
    "extremes",
    "generate",
    "lambda_grid",
    "oracle_front",
    "refine",
    "solve",
    "sweep",
]


def _as_text(instance):
    """Accept an instance as JSON text or as a dict."""
    if isinstance(instance, str):
        return instance
    return _json.dumps(instance)


def generate(k, area_m=1000.0, seed=1, as_dict=True):
    """Deterministically generate an instance (dict by default)."""
    text = _native.generate(k, area_m, seed)
    return _json.loads(text) if as_dict else text


def evaluate(instance, cycles):
    """Exact fly-hover metrics of a tour given as ``[[sensor ids], ...]``."""
    return _native.evaluate(_as_text(instance), cycles)


def extremes(instance):
    """Normalisation anchors and the tours that realise them."""
    return _native.extremes(_as_text(instance))


def solve(instance, lam=0.5, solver="benders", tol=1e-6, with_trace=False):
    """Optimal tour for one scalarisation weight ``lam`` in [0, 1]."""
    return _native.solve(_as_text(instance), lam, solver, tol, with_trace)


def sweep(instance, lambdas, solver="benders", tol=1e-6, jobs=1, keep_duplicates=False):
    """Trade-off curve over a list of weights, deduplicated by tour."""
    return _native.sweep(_as_text(instance), list(lambdas), solver, tol, jobs,
                         keep_duplicates)


def lambda_grid(a, step, b):
    """Inclusive weight grid ``a:step:b``."""
    return _native.lambda_grid(a, step, b)


def refine(instance, cycles, lam=0.5):
    """Coverage-disc trajectory refinement of a tour."""
    return _native.refine(_as_text(instance), cycles, lam)


def oracle_front(instance):
    """Exhaustively enumerated non-dominated tours (small instances only)."""
    return _native.oracle_front(_as_text(instance))
