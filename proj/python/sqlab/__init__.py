"""Statistical query dimensions, cover games and solvers.

Distributions are plain sequences of probabilities over an indexed domain.
Problems are the JSON documents produced by :func:`generate` (the same format
the command-line tool reads and writes). Structured results come back as dicts.
"""

import json

from . import _core
from ._core import SqlabError

__all__ = [
    "SqlabError",
    "bridge",
    "combined_audit",
    "crsd",
    "generate",
    "line_audit",
    "mw_run",
    "norm",
    "rho",
    "rsd_decision",
    "rsd_search",
    "sd_decision",
    "solve",
    "stream_solve",
]


def _rows(dists):
    return [list(map(float, d)) for d in dists]


def _problem(problem):
    return problem if isinstance(problem, str) else json.dumps(problem)


def generate(name, **params):
    """Problem instance as a dict. ``name`` is ``"biclique"`` (n, k, part) or ``"line"`` (p, marginal, eps)."""
    return json.loads(_core.generate(name, **params))


def rsd_decision(dists, d0, tau, kappa="k1"):
    return json.loads(_core.rsd_decision(_rows(dists), list(d0), tau, kappa))


def sd_decision(dists, d0, tau, kappa="k1"):
    return json.loads(_core.sd_decision(_rows(dists), list(d0), tau, kappa))


def crsd(dists, d0, kappa="k1"):
    return json.loads(_core.crsd(_rows(dists), list(d0), kappa))


def combined_audit(dists, d0):
    return json.loads(_core.combined_audit(_rows(dists), list(d0)))


def rsd_search(problem, tau, alpha=1.0):
    return json.loads(_core.rsd_search(_problem(problem), tau, alpha))


def norm(which, dists, d0, mu=None):
    """One of kbar1, kbar2, kbar2_spectral, kbarv; ``mu`` defaults to uniform."""
    return json.loads(_core.norm(which, _rows(dists), list(d0), None if mu is None else list(mu)))


def rho(dists, d0):
    return _core.rho(_rows(dists), list(d0))


def line_audit(p):
    return json.loads(_core.line_audit(p))


def solve(problem, input, tau, seed=0, answers="exact"):
    """Universal search solver on ``dists[input]`` with STAT(tau/3) answers."""
    return json.loads(_core.solve(_problem(problem), input, tau, seed, answers))


def stream_solve(problem, input, tau, delta=0.1, seed=0):
    return json.loads(_core.stream_solve(_problem(problem), input, tau, delta, seed))


def mw_run(w1, gamma, losses):
    """Final weights and best-expert regret after one update per loss vector."""
    weights, regret = _core.mw_run(list(w1), gamma, _rows(losses))
    return list(weights), regret


bridge = _core.bridge
