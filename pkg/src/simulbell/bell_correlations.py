"""CHSH correlations, the classical bound, the single-run four-particle scheme, and sampling."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from .spin_ops import HALF, Direction, X_HAT, Z_HAT, as_direction, spin_along
from .tensor_core import StateVector, apply_local
from .uniqueness import PROB_FLOOR, is_unique, joint_distribution

CLASSICAL_BOUND = 2
TSIRELSON_BOUND = 2 * sqrt(2)
# particles (0-based) measured for E(a,b), E(a,b'), E(a',b), E(a',b') in the single-run scheme
SCHEME_PAIRS = ((0, 2), (0, 3), (1, 2), (1, 3))


@dataclass(frozen=True)
class ChshSetting:
    a: Direction
    a_prime: Direction
    b: Direction
    b_prime: Direction

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, as_direction(getattr(self, name)))

    @classmethod
    def standard(cls) -> "ChshSetting":
        """Coplanar (xz-plane) angles 0, 90 degrees for a, a' and 45, -45 for b, b'.

        With the last term subtracted these maximize |S| on the singlet (2 sqrt 2).
        """
        ang = lambda deg: Direction.from_angles(np.radians(deg), 0.0)
        return cls(Z_HAT, X_HAT, ang(45), ang(-45))

    def pairs(self) -> tuple[tuple[Direction, Direction], ...]:
        return ((self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime))


@dataclass(frozen=True)
class ChshResult:
    e_ab: float
    e_ab_prime: float
    e_a_prime_b: float
    e_a_prime_b_prime: float

    @property
    def terms(self) -> tuple[float, float, float, float]:
        return (self.e_ab, self.e_ab_prime, self.e_a_prime_b, self.e_a_prime_b_prime)

    @property
    def s(self) -> float:
        return self.e_ab + self.e_ab_prime + self.e_a_prime_b - self.e_a_prime_b_prime

    @property
    def abs_s(self) -> float:
        return abs(self.s)


def _pauli_along(direction) -> np.ndarray:
    return 2 * spin_along(HALF, direction)[0].matrix


def _require_qubits(psi: StateVector) -> None:
    if psi.local_dim != 2:
        raise ValueError(f"CHSH correlations need qubits (d=2), got d={psi.local_dim}")


def pair_expectation(psi: StateVector, i: int, j: int, a, b) -> float:
    """<(a.sigma)_i (b.sigma)_j>, the correlation of the +-1 outcomes of particles i and j."""
    _require_qubits(psi)
    n = psi.num_particles
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"need two distinct particles in [0, {n}), got {i}, {j}")
    ops = [None] * n
    ops[i], ops[j] = _pauli_along(a), _pauli_along(b)
    return float(np.vdot(psi.amplitudes, apply_local(psi.amplitudes, ops, n, 2)).real)


def chsh_value(psi: StateVector, setting: ChshSetting) -> ChshResult:
    if psi.num_particles != 2:
        raise ValueError(f"chsh_value expects two particles, got {psi.num_particles}")
    return ChshResult(*(pair_expectation(psi, 0, 1, x, y) for x, y in setting.pairs()))


def classical_chsh_max() -> int:
    """Largest |S| over every deterministic +-1 assignment to A, A', B, B'."""
    return max(
        abs(a * b + a * bp + ap * b - ap * bp)
        for a, ap, b, bp in itertools.product((-1, 1), repeat=4)
    )


@dataclass(frozen=True)
class SchemeTerm:
    particles: tuple[int, int]
    directions: tuple[Direction, Direction]
    correlation: float
    singlet_reference: float

    @property
    def deviation(self) -> float:
        return abs(self.correlation - self.singlet_reference)


@dataclass(frozen=True)
class SimultaneousSchemeReport:
    """Necessary conditions for inferring all four CHSH terms from one four-particle run.

    Particles 0, 1 sit at the left station (a, a'); 2, 3 at the right (b, b').
    """

    setting: ChshSetting
    terms: tuple[SchemeTerm, ...]
    unique: dict[str, bool] = field(default_factory=dict)
    pairing: tuple[tuple[int, int], ...] = SCHEME_PAIRS

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(t.deviation for t in self.terms)

    @property
    def s(self) -> float:
        e = [t.correlation for t in self.terms]
        return e[0] + e[1] + e[2] - e[3]

    @property
    def counterfactual_valid(self) -> bool:
        """Inference needs the uniqueness property along all four directions."""
        return all(self.unique.values())


def simultaneous_scheme_report(psi4: StateVector, setting: ChshSetting, tol: float = PROB_FLOOR) -> SimultaneousSchemeReport:
    _require_qubits(psi4)
    if psi4.num_particles != 4:
        raise ValueError(f"the single-run scheme needs four particles, got {psi4.num_particles}")
    terms = tuple(
        SchemeTerm((i, j), (x, y), pair_expectation(psi4, i, j, x, y), -x.dot(y))
        for (i, j), (x, y) in zip(SCHEME_PAIRS, setting.pairs())
    )
    names = ("a", "a_prime", "b", "b_prime")
    unique = {nm: is_unique(psi4, getattr(setting, nm), tol)[0] for nm in names}
    return SimultaneousSchemeReport(setting, terms, unique)


@dataclass(frozen=True, eq=False)
class SampleResult:
    """Seeded draws of joint outcomes.

    ``outcomes`` holds per-site digits (0 is m=+j); ``values`` the rescaled
    outcomes m/j, so qubits give +-1. ``correlations`` maps a particle pair
    to (estimate, standard error) of the mean product of values.
    """

    outcomes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    correlations: dict[tuple[int, int], tuple[float, float]]
    seed: int


def sample_outcomes(psi: StateVector, directions: Sequence, count: int, seed: int) -> SampleResult:
    """Draw ``count`` i.i.d. outcome tuples by inverse-CDF over the joint distribution.

    Uses numpy's PCG64 generator seeded with ``seed``; same inputs give the
    same samples.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    dist = joint_distribution(psi, directions)
    n, d = dist.n, dist.d
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(np.uint64(seed))
    flat = np.searchsorted(cdf, rng.random(count), side="right")
    flat = np.minimum(flat, cdf.size - 1)
    outcomes = np.stack(np.unravel_index(flat, (d,) * n), axis=1)
    j = (d - 1) / 2
    values = (j - outcomes) / j
    corr = {}
    for i, k in itertools.combinations(range(n), 2):
        prod = values[:, i] * values[:, k]
        se = float(prod.std(ddof=1) / np.sqrt(count)) if count > 1 else float("nan")
        corr[(i, k)] = (float(prod.mean()), se)
    return SampleResult(outcomes, values, corr, int(seed))
