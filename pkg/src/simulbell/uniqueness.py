"""The uniqueness property: does one particle's outcome fix everyone else's?

For a direction n, every particle is measured along n. The state is unique
along n when, for every particle k and every outcome m of k that occurs, the
outcomes of all other particles are certain. ``nonuniqueness_score`` is the
continuous surrogate

    sum_n sum_k sum_m p_k(m) * (1 - max_rest p(rest | k = m))

which vanishes exactly on states unique along every direction of the set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .spin_ops import Direction, Spin, as_direction, eigenbasis
from .tensor_core import StateVector, index_to_label, parse_label

PROB_FLOOR = 1e-9


class ZeroProbabilityError(ValueError):
    """Conditioning on an outcome that (numerically) never occurs."""


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    n: int
    d: int
    directions: tuple[Direction, ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        total = float(self.probs.sum())
        if np.any(self.probs < 0) or abs(total - 1.0) > 1e-10:
            raise ValueError(f"not a probability distribution (total={total!r})")

    def prob(self, label) -> float:
        """Probability of an outcome tuple given as "+-" text or m values."""
        digits = parse_label(label, self.n, self.d)
        return float(self.probs.reshape((self.d,) * self.n)[digits])

    def as_dict(self, floor: float = 0.0) -> dict[tuple[Fraction, ...], float]:
        return {
            index_to_label(i, self.n, self.d): float(p)
            for i, p in enumerate(self.probs)
            if p > floor
        }

    def marginal(self, sites: Sequence[int]) -> np.ndarray:
        t = self.probs.reshape((self.d,) * self.n)
        drop = tuple(k for k in range(self.n) if k not in sites)
        return t.sum(axis=drop)


@dataclass(frozen=True)
class Witness:
    """Worst case found: particle, its outcome m, best conditional probability of the rest."""

    particle: int
    outcome: Fraction
    best_conditional: float


@dataclass(frozen=True)
class DirectionVerdict:
    direction: Direction
    is_unique: bool
    score: float
    witness: Witness


@dataclass(frozen=True)
class UniquenessReport:
    state: str
    verdicts: tuple[DirectionVerdict, ...]

    @property
    def total_score(self) -> float:
        return sum(v.score for v in self.verdicts)

    @property
    def all_unique(self) -> bool:
        return all(v.is_unique for v in self.verdicts)


def _spin_of(psi: StateVector) -> Spin:
    return Spin(psi.local_dim - 1)


def joint_distribution(psi: StateVector, directions: Sequence) -> OutcomeDistribution:
    """Joint outcome probabilities with particle k measured along ``directions[k]``."""
    dirs = tuple(as_direction(d) for d in directions)
    if len(dirs) != psi.num_particles:
        raise ValueError(f"need {psi.num_particles} directions, got {len(dirs)}")
    s = _spin_of(psi)
    us = np.stack([eigenbasis(s, d) for d in dirs])
    amps = kernels.transform_amplitudes(psi.amplitudes, us)
    probs = np.abs(amps) ** 2
    probs.setflags(write=False)
    return OutcomeDistribution(psi.num_particles, psi.local_dim, dirs, probs)


def _outcome_digit(s: Spin, outcome) -> int:
    return parse_label([outcome] if not isinstance(outcome, str) else outcome, 1, s.dim)[0]


def conditional_after_measurement(psi: StateVector, particle: int, direction, outcome):
    """Probability of ``outcome`` for ``particle`` measured along ``direction``, and the collapsed state.

    ``outcome`` is an m value or "+", "-", "0". Raises ZeroProbabilityError if
    the outcome has probability below 1e-12.
    """
    n, d = psi.num_particles, psi.local_dim
    if not 0 <= particle < n:
        raise ValueError(f"particle {particle} out of range for {n} particles")
    s = _spin_of(psi)
    vec = eigenbasis(s, direction)[:, _outcome_digit(s, outcome)]
    proj = np.outer(vec, vec.conj())
    t = np.moveaxis(np.tensordot(proj, psi.tensor, axes=([1], [particle])), 0, particle).reshape(-1)
    prob = float(np.vdot(t, t).real)
    if prob <= 1e-12:
        raise ZeroProbabilityError(f"outcome {outcome!r} of particle {particle} has probability {prob:.3e}")
    return prob, StateVector(n, d, t / np.sqrt(prob))


def _direction_terms(amps: np.ndarray, u: np.ndarray, n: int, d: int, floor: float):
    """Score of one direction plus the (marginal, best conditional) tables."""
    probs = np.abs(kernels.transform_amplitudes(amps, np.broadcast_to(u, (n, d, d)))) ** 2
    marg, best = kernels.uniqueness_tables(probs, n, d)
    occurs = marg > floor
    cond = np.ones_like(marg)
    cond[occurs] = best[occurs] / marg[occurs]
    score = float(np.sum(marg[occurs] * (1.0 - cond[occurs])))
    return score, marg, cond


def is_unique(psi: StateVector, direction, tol: float = PROB_FLOOR):
    """Uniqueness along one direction (all particles measured along it).

    Returns ``(verdict, score, witness)``; the score uses ``tol`` as the
    probability floor for outcomes that occur.
    """
    if not 0 < tol < 0.5:
        raise ValueError("tol must lie in (0, 0.5)")
    d_ = as_direction(direction)
    n, d = psi.num_particles, psi.local_dim
    s = _spin_of(psi)
    score, marg, cond = _direction_terms(psi.amplitudes, eigenbasis(s, d_), n, d, tol)
    k, a = np.unravel_index(int(np.argmin(cond)), cond.shape)
    witness = Witness(int(k), s.j - int(a), float(cond[k, a]))
    return bool(cond.min() >= 1.0 - tol), score, witness


def per_particle_scores(psi: StateVector, direction, floor: float = PROB_FLOOR) -> np.ndarray:
    """Contribution of each particle to the single-direction score."""
    s = _spin_of(psi)
    _, marg, cond = _direction_terms(psi.amplitudes, eigenbasis(s, direction), psi.num_particles, psi.local_dim, floor)
    return np.where(marg > floor, marg * (1.0 - cond), 0.0).sum(axis=1)


class ScoreEvaluator:
    """Nonuniqueness score over a fixed direction set, on raw amplitude vectors.

    Eigenbases are computed once; this is the objective the search calls.
    """

    def __init__(self, n: int, spin: Spin, directions: Sequence, floor: float = PROB_FLOOR):
        dirs = tuple(as_direction(d) for d in directions)
        if not dirs:
            raise ValueError("direction set is empty")
        self.n, self.spin, self.directions, self.floor = n, spin, dirs, floor
        d = spin.dim
        self._stacks = [np.ascontiguousarray(np.broadcast_to(eigenbasis(spin, x), (n, d, d))) for x in dirs]

    def per_direction(self, amps: np.ndarray) -> list[float]:
        n, d = self.n, self.spin.dim
        out = []
        for us in self._stacks:
            probs = np.abs(kernels.transform_amplitudes(amps, us)) ** 2
            marg, best = kernels.uniqueness_tables(probs, n, d)
            occurs = marg > self.floor
            out.append(float(np.sum(marg[occurs] - best[occurs])))
        return out

    def __call__(self, amps: np.ndarray) -> float:
        return float(sum(self.per_direction(amps)))


def nonuniqueness_score(psi: StateVector, directions: Sequence, floor: float = PROB_FLOOR) -> float:
    dirs = list(directions)
    if not dirs:
        raise ValueError("direction set is empty")
    return ScoreEvaluator(psi.num_particles, _spin_of(psi), dirs, floor)(psi.amplitudes)


def uniqueness_report(psi: StateVector, directions: Sequence, tol: float = PROB_FLOOR, name: str = "") -> UniquenessReport:
    verdicts = []
    for x in directions:
        d_ = as_direction(x)
        ok, score, witness = is_unique(psi, d_, tol)
        verdicts.append(DirectionVerdict(d_, ok, score, witness))
    return UniquenessReport(name, tuple(verdicts))
