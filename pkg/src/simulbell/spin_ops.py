"""Spin-j component matrices, observables along a direction, and rotations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .tensor_core import Operator

UNIT_TOL = 1e-12
_PHASE_TIE = 1e-9


@dataclass(frozen=True)
class Spin:
    two_j: int

    def __post_init__(self):
        if int(self.two_j) != self.two_j or self.two_j < 0:
            raise ValueError(f"two_j must be a nonnegative integer, got {self.two_j!r}")

    @classmethod
    def parse(cls, text) -> "Spin":
        """Accepts "1/2", "1", "3/2", 0.5, Fraction(3, 2), ..."""
        try:
            j = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse spin {text!r}") from None
        if (2 * j).denominator != 1 or j < 0:
            raise ValueError(f"spin {text!r} is not a nonnegative half-integer")
        return cls(int(2 * j))

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def __str__(self) -> str:
        return str(self.j)


HALF = Spin(1)
ONE = Spin(2)


@dataclass(frozen=True)
class Direction:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm2 = self.x**2 + self.y**2 + self.z**2
        if abs(norm2 - 1.0) >= UNIT_TOL:
            raise ValueError(f"direction ({self.x}, {self.y}, {self.z}) is not a unit vector")

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> "Direction":
        v = np.asarray(v, dtype=float).ravel()
        if v.shape != (3,):
            raise ValueError(f"direction needs 3 components, got {v.size}")
        if normalize:
            norm = np.linalg.norm(v)
            if norm == 0:
                raise ValueError("zero vector has no direction")
            v = v / norm
        return cls(*v)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Direction":
        """Polar angle ``theta`` from +z, azimuth ``phi`` from +x."""
        v = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        return cls.from_vector(v / np.linalg.norm(v) + 0.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "Direction") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> "Direction":
        return Direction(-self.x, -self.y, -self.z)

    def rotated(self, rot: np.ndarray) -> "Direction":
        """Apply a 3x3 rotation matrix."""
        return Direction.from_vector(rot @ self.vector, normalize=True)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


X_HAT = Direction(1.0, 0.0, 0.0)
Y_HAT = Direction(0.0, 1.0, 0.0)
Z_HAT = Direction(0.0, 0.0, 1.0)


def as_direction(d) -> Direction:
    return d if isinstance(d, Direction) else Direction.from_vector(d)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues m (descending) and matching eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive.

    Entries within a small tolerance of the maximum magnitude tie; the lowest
    index wins.
    """
    mags = np.abs(v)
    if mags.size == 0 or mags.max() == 0:
        return v
    k = int(np.flatnonzero(mags >= mags.max() - _PHASE_TIE)[0])
    return v * (abs(v[k]) / v[k])


@lru_cache(maxsize=64)
def _spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((two_j + 1, two_j + 1), dtype=complex)
    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; row k-1 holds m+1 when column k holds m
    for k in range(1, two_j + 1):
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    for a in (jx, jy, jz):
        a.setflags(write=False)
    return jx, jy, jz


def spin_matrices(s: Spin) -> tuple[Operator, Operator, Operator]:
    """(Jx, Jy, Jz) in the m-descending basis."""
    if s.two_j < 1:
        raise ValueError("spin matrices require j >= 1/2")
    return tuple(Operator(a, hermitian=True) for a in _spin_matrices(s.two_j))


def _generator(s: Spin, d: Direction) -> np.ndarray:
    jx, jy, jz = _spin_matrices(s.two_j)
    return d.x * jx + d.y * jy + d.z * jz


@lru_cache(maxsize=4096)
def _eigensystem(two_j: int, xyz: tuple[float, float, float]) -> tuple[np.ndarray, np.ndarray]:
    gen = _generator(Spin(two_j), Direction(*xyz))
    vals, vecs = np.linalg.eigh(gen)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    vecs = np.column_stack([fix_phase(vecs[:, k]) for k in range(vecs.shape[1])])
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def spin_along(s: Spin, direction) -> tuple[Operator, Eigensystem]:
    """Observable x Jx + y Jy + z Jz and its eigensystem, m descending.

    Raises ValueError for a non-unit direction; nothing is renormalized here.
    """
    d = as_direction(direction)
    op = Operator(_generator(s, d), hermitian=True)
    vals, vecs = _eigensystem(s.two_j, d.as_tuple())
    return op, Eigensystem(vals, vecs)


def eigenbasis(s: Spin, direction) -> np.ndarray:
    """d x d unitary whose column k is the m = j - k eigenvector along ``direction``."""
    return _eigensystem(s.two_j, as_direction(direction).as_tuple())[1]


def rotation_operator(s: Spin, axis, angle: float) -> Operator:
    """exp(-i angle (axis . J)), computed from the eigendecomposition of the generator."""
    d = as_direction(axis)
    vals, vecs = np.linalg.eigh(_generator(s, d))
    u = (vecs * np.exp(-1j * angle * vals)) @ vecs.conj().T
    return Operator(u, unitary=True)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """SO(3) matrix matching :func:`rotation_operator` (Rodrigues form)."""
    k = as_direction(axis).vector
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * kx + (1 - np.cos(angle)) * (kx @ kx)


def random_direction(rng: np.random.Generator) -> Direction:
    v = rng.standard_normal(3)
    return Direction.from_vector(v / np.linalg.norm(v))


def generic_direction(rng: np.random.Generator, margin: float = 0.1) -> Direction:
    """Uniform random direction at least ``margin`` radians from every coordinate axis."""
    while True:
        d = random_direction(rng)
        if np.min(np.arccos(np.clip(np.abs(d.vector), 0.0, 1.0))) >= margin:
            return d
