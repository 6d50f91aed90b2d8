"""Multi-restart local search minimizing the nonuniqueness score.

States are parametrized by 2*D reals (real/imaginary parts of D coefficients)
on the unit sphere, either over the full product basis or over the columns of
a singlet basis. Each restart runs projected gradient descent with central
finite-difference gradients and a shrinking/growing step size. No global
optimality is claimed; the minima are empirical evidence only.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .singlet_space import SingletBasis, singlet_basis
from .spin_ops import Direction, Spin, as_direction
from .tensor_core import MAX_DIM, StateVector
from .uniqueness import PROB_FLOOR, ScoreEvaluator

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    n: int
    spin: Spin
    directions: tuple[Direction, ...]
    restricted: bool = True
    restarts: int = 20
    max_iter: int = 2000
    initial_step: float = 0.3
    shrink: float = 0.5
    grow: float = 1.5
    min_step: float = 1e-10
    tol: float = 1e-10
    fd_step: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(as_direction(d) for d in self.directions))
        if not self.directions:
            raise ValueError("direction set is empty")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.tol <= 0 or self.min_step <= 0 or self.fd_step <= 0:
            raise ValueError("tolerances and step sizes must be positive")
        if not 0 < self.shrink < 1 or self.grow < 1:
            raise ValueError("need 0 < shrink < 1 <= grow")
        if self.n < 1 or self.spin.dim**self.n > MAX_DIM:
            raise ValueError(f"dimension {self.spin.dim}**{self.n} outside [1, {MAX_DIM}]")


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_score: float
    best_state: StateVector = field(repr=False)
    restart_scores: tuple[float, ...]
    iterations: tuple[int, ...]
    directions: tuple[Direction, ...]
    traces: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    @property
    def best_restart(self) -> int:
        return int(np.argmin(self.restart_scores))

    @property
    def spread(self) -> float:
        """(max - min) / min of the per-restart final scores."""
        lo, hi = min(self.restart_scores), max(self.restart_scores)
        return (hi - lo) / lo if lo > 0 else float("inf") if hi > 0 else 0.0


def _coefficients(params: np.ndarray) -> np.ndarray:
    p = np.asarray(params, dtype=float).ravel()
    if p.size % 2:
        raise ValueError("parameter vector must have even length")
    return p[0::2] + 1j * p[1::2]


def _amplitudes(params: np.ndarray, basis_matrix: Optional[np.ndarray]) -> np.ndarray:
    c = _coefficients(params)
    v = c if basis_matrix is None else basis_matrix @ c
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("parameter vector is all zero")
    return v / nrm


def parametrize(params, basis: Optional[SingletBasis] = None, n: Optional[int] = None, spin: Optional[Spin] = None) -> StateVector:
    """Map 2*D reals to a normalized state.

    Pairs (params[2i], params[2i+1]) are the real and imaginary parts of
    coefficient i. With ``basis`` the coefficients weight its columns;
    otherwise ``n`` and ``spin`` give the product space.
    """
    p = np.asarray(params, dtype=float).ravel()
    if basis is not None:
        if p.size != 2 * basis.dim:
            raise ValueError(f"need {2 * basis.dim} parameters for this basis, got {p.size}")
        return StateVector(basis.n, basis.spin.dim, _amplitudes(p, basis.matrix))
    if n is None or spin is None:
        raise ValueError("unrestricted parametrization needs n and spin")
    if p.size != 2 * spin.dim**n:
        raise ValueError(f"need {2 * spin.dim ** n} parameters, got {p.size}")
    return StateVector(n, spin.dim, _amplitudes(p, None))


def fd_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    """Central finite-difference gradient."""
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


class _Objective:
    def __init__(self, config: SearchConfig):
        self.evaluator = ScoreEvaluator(config.n, config.spin, config.directions, PROB_FLOOR)
        self.basis = singlet_basis(config.n, config.spin) if config.restricted else None
        self.matrix = self.basis.matrix if self.basis is not None else None
        self.nparams = 2 * (self.basis.dim if self.basis is not None else config.spin.dim**config.n)

    def __call__(self, x: np.ndarray) -> float:
        return self.evaluator(_amplitudes(x, self.matrix))


def _descend(obj: _Objective, x0: np.ndarray, cfg: SearchConfig):
    x = x0 / np.linalg.norm(x0)
    f = obj(x)
    trace = [f]
    step = cfg.initial_step
    it = 0
    while it < cfg.max_iter and f > cfg.tol and step >= cfg.min_step:
        it += 1
        g = fd_gradient(obj, x, cfg.fd_step)
        g -= np.dot(g, x) * x
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        direction = g / gn
        while step >= cfg.min_step:
            y = x - step * direction
            y /= np.linalg.norm(y)
            fy = obj(y)
            if fy < f - TIE_TOL:
                x, f = y, fy
                step = min(step * cfg.grow, 1.0)
                break
            step *= cfg.shrink
        trace.append(f)
    return x, f, it, trace


def minimize_score(config: SearchConfig, keep_traces: bool = False) -> SearchResult:
    """Run ``config.restarts`` seeded local descents; return the best state found.

    Restart r draws its start from a standard normal stream spawned from the
    master seed, so restarts are independent and order does not matter.
    """
    obj = _Objective(config)
    if obj.nparams == 0:
        raise ValueError("search space is empty (no singlet states for this n and spin)")
    streams = np.random.SeedSequence(config.seed).spawn(config.restarts)
    finals, iters, traces, states = [], [], [], []
    for r, ss in enumerate(streams):
        x0 = np.random.default_rng(ss).standard_normal(obj.nparams)
        x, f, it, trace = _descend(obj, x0, config)
        log.debug("restart %d: score %.3e after %d iterations", r, f, it)
        finals.append(f)
        iters.append(it)
        states.append(x)
        if keep_traces:
            traces.append(tuple(trace))
    best = int(np.argmin(finals))  # first index wins ties
    n, d = config.n, config.spin.dim
    best_state = StateVector(n, d, _amplitudes(states[best], obj.matrix))
    return SearchResult(
        best_score=finals[best],
        best_state=best_state,
        restart_scores=tuple(finals),
        iterations=tuple(iters),
        directions=config.directions,
        traces=tuple(traces),
    )
