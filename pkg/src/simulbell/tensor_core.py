"""Dense complex linear algebra over d**n product spaces.

Basis ordering: within a site, m runs from +j down to -j (so flat digit 0 is
the "+" state); particle 0 is the slowest-varying index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

MAX_DIM = 729
NORM_TOL = 1e-12
FLAG_TOL = 1e-12

LabelLike = Union[str, Sequence]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``num_particles`` sites of local dimension ``local_dim``."""

    num_particles: int
    local_dim: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        n, d = self.num_particles, self.local_dim
        if n < 1 or d < 1:
            raise ValueError(f"invalid shape n={n}, d={d}")
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != d**n:
            raise ValueError(f"expected {d**n} amplitudes for n={n}, d={d}, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) >= NORM_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes, n: int, d: int) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(n, d, amps / norm)

    @property
    def dim(self) -> int:
        return self.local_dim**self.num_particles

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.local_dim,) * self.num_particles)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def distance_up_to_phase(self, other: "StateVector") -> float:
        """min over global phases of ||self - e^{i phi} other||."""
        ov = abs(self.overlap(other))
        return float(np.sqrt(max(0.0, 2.0 - 2.0 * min(ov, 1.0))))

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return (
            self.num_particles == other.num_particles
            and self.local_dim == other.local_dim
            and bool(np.max(np.abs(self.amplitudes - other.amplitudes)) < atol)
        )


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix; the hermitian/unitary flags are checked, not trusted."""

    matrix: np.ndarray = field(repr=False)
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if self.hermitian:
            err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if err >= FLAG_TOL:
                raise ValueError(f"matrix flagged hermitian deviates by {err:.3e}")
        if self.unitary:
            err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) if m.size else 0.0
            if err >= FLAG_TOL:
                raise ValueError(f"matrix flagged unitary deviates by {err:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            return self.matrix @ other.amplitudes
        return self.matrix @ np.asarray(other)

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix + other.matrix, hermitian=self.hermitian and other.hermitian)

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, hermitian=self.hermitian, unitary=self.unitary)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim), hermitian=True, unitary=True)


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; ``a`` indexes the slower-varying block."""
    return Operator(
        np.kron(a.matrix, b.matrix),
        hermitian=a.hermitian and b.hermitian,
        unitary=a.unitary and b.unitary,
    )


def embed_site_operator(op: Operator, site: int, n: int, d: int) -> Operator:
    """Return I^(site) (x) op (x) I^(n-1-site) acting on d**n."""
    if op.dim != d:
        raise ValueError(f"operator dimension {op.dim} does not match local dimension {d}")
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} particles")
    if d**n > MAX_DIM:
        raise ValueError(f"dimension {d}**{n} exceeds {MAX_DIM}")
    left = np.eye(d**site)
    right = np.eye(d ** (n - 1 - site))
    m = np.kron(np.kron(left, op.matrix), right)
    return Operator(m, hermitian=op.hermitian, unitary=op.unitary)


def _m_values(d: int) -> list[Fraction]:
    j = Fraction(d - 1, 2)
    return [j - k for k in range(d)]


def _digit_of(symbol, d: int) -> int:
    j = Fraction(d - 1, 2)
    if isinstance(symbol, str):
        if symbol == "+":
            m = j
        elif symbol == "-":
            m = -j
        elif symbol == "0":
            m = Fraction(0)
        else:
            try:
                m = Fraction(symbol)
            except ValueError:
                raise ValueError(f"unknown outcome symbol {symbol!r}") from None
    else:
        m = Fraction(symbol).limit_denominator(2)
        if abs(float(m) - float(symbol)) > 1e-12:
            raise ValueError(f"{symbol!r} is not a half-integer")
    digit = j - m
    if digit.denominator != 1 or not 0 <= digit < d:
        raise ValueError(f"m={m} is not an allowed value for d={d}")
    return int(digit)


def parse_label(label: LabelLike, n: int, d: int) -> tuple[int, ...]:
    """Per-site digits for a ket label.

    ``label`` is either a string of "+", "-", "0" symbols ("+" is m=+j, "-" is
    m=-j), or a sequence of magnetic quantum numbers.
    """
    symbols = list(label) if isinstance(label, str) else list(label)
    if len(symbols) != n:
        raise ValueError(f"label {label!r} has {len(symbols)} sites, expected {n}")
    return tuple(_digit_of(s, d) for s in symbols)


def label_to_index(label: LabelLike, n: int, d: int) -> int:
    idx = 0
    for digit in parse_label(label, n, d):
        idx = idx * d + digit
    return idx


def index_to_digits(index: int, n: int, d: int) -> tuple[int, ...]:
    if not 0 <= index < d**n:
        raise ValueError(f"index {index} out of range [0, {d**n})")
    digits = []
    for _ in range(n):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


def index_to_label(index: int, n: int, d: int) -> tuple[Fraction, ...]:
    """Magnetic quantum numbers (as Fractions) of the basis ket at ``index``."""
    ms = _m_values(d)
    return tuple(ms[k] for k in index_to_digits(index, n, d))


def label_string(index: int, n: int, d: int) -> str:
    """Compact ket text such as ``+-0`` (falls back to m values for spin > 1)."""
    ms = index_to_label(index, n, d)
    j = Fraction(d - 1, 2)
    if d <= 3:
        return "".join("+" if m == j else "-" if m == -j else "0" for m in ms)
    return ",".join(str(m) for m in ms)


def state_from_terms(
    terms: Iterable[tuple[LabelLike, complex]], n: int, d: int
) -> tuple[StateVector, float]:
    """Build a normalized state from ``(label, coefficient)`` pairs.

    Duplicate labels are summed. Returns the state together with the norm
    before normalization, so printed prefactors can be checked by the caller.
    """
    if d**n > MAX_DIM:
        raise ValueError(f"dimension {d}**{n} exceeds {MAX_DIM}")
    amps = np.zeros(d**n, dtype=complex)
    for label, coeff in terms:
        amps[label_to_index(label, n, d)] += complex(coeff)
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ValueError("all coefficients are zero")
    return StateVector(n, d, amps / norm), norm


def basis_state(label: LabelLike, n: int, d: int) -> StateVector:
    return state_from_terms([(label, 1.0)], n, d)[0]


def apply_local(psi: np.ndarray, ops: Sequence[np.ndarray], n: int, d: int) -> np.ndarray:
    """Apply ``ops[k]`` (d x d) to site k of a flat amplitude vector."""
    t = np.asarray(psi, dtype=complex).reshape((d,) * n)
    for k, op in enumerate(ops):
        if op is None:
            continue
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [k])), 0, k)
    return t.reshape(-1)


# -- state files -----------------------------------------------------------

def state_to_dict(psi: StateVector) -> dict:
    return {
        "n": psi.num_particles,
        "d": psi.local_dim,
        "re": [float(x) for x in psi.amplitudes.real],
        "im": [float(x) for x in psi.amplitudes.imag],
    }


def state_from_dict(doc: dict) -> StateVector:
    try:
        n, d, re, im = int(doc["n"]), int(doc["d"]), doc["re"], doc["im"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state document: {exc}") from None
    if len(re) != len(im) or len(re) != d**n:
        raise ValueError(f"state document needs {d**n} re/im entries, got {len(re)}/{len(im)}")
    amps = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state in document is not normalized (norm={norm!r})")
    return StateVector(n, d, amps / norm)


def save_state(psi: StateVector, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(psi), indent=2) + "\n")


def load_state(path) -> StateVector:
    return state_from_dict(json.loads(Path(path).read_text()))
