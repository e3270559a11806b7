"""Fractional Bayes factor scoring and structure search for
covariate-adjusted Gaussian DAG and decomposable models.

Vertex and predictor indices are 0-based.
"""

import json as _json

import numpy as _np

from ._core import (  # noqa: F401
    CycleError,
    DagscoreError,
    IoError,
    NonChordalError,
    ProprietyError,
    ValidationError,
    is_chordal,
    log_ml_subset,
    log_multigamma,
    markov_equivalent,
)
from . import _core

__all__ = [
    "CycleError",
    "DagscoreError",
    "IoError",
    "NonChordalError",
    "ProprietyError",
    "ValidationError",
    "dag_log_ml",
    "decomposable_log_ml",
    "enumerate_graphs",
    "greedy_search",
    "is_chordal",
    "log_ml_subset",
    "log_multigamma",
    "markov_equivalent",
    "mc3_search",
    "simulate",
]


def _matrix(a):
    return None if a is None else _np.asarray(a, dtype=float)


def dag_log_ml(y, parents, z=None, frac="recommended"):
    """Score report for a DAG given as a list of parent lists."""
    return _json.loads(_core._dag_report(_matrix(y), parents, _matrix(z), frac))


def decomposable_log_ml(y, edges, z=None, frac="recommended"):
    """Score report for an undirected chordal graph given as an edge list."""
    return _json.loads(_core._decomposable_report(_matrix(y), edges, _matrix(z), frac))


def greedy_search(y, z=None, frac="recommended", prior="default", max_parents=3,
                  max_predictors=5, restarts=1, seed=0):
    return _json.loads(_core._greedy(_matrix(y), _matrix(z), frac, prior, max_parents,
                                     max_predictors, restarts, seed))


def mc3_search(y, z=None, frac="recommended", prior="default", iterations=10000,
               temperature=1.0, chains=1, seed=0):
    return _json.loads(_core._mc3(_matrix(y), _matrix(z), frac, prior, iterations,
                                  temperature, chains, seed))


def enumerate_graphs(y, z=None, frac="recommended", prior="uniform", mode="dag"):
    return _json.loads(_core._enumerate(_matrix(y), _matrix(z), frac, prior, mode))


def simulate(spec, seed=0):
    """Returns (Y, Z, truth) for a simulation spec dict."""
    y, z, truth = _core._simulate(_json.dumps(spec), seed)
    return y, z, _json.loads(truth)
