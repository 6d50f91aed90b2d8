"""Total-spin-zero subspaces, the named states, form invariance and term counts."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import sqrt

import numpy as np

from . import kernels
from .spin_ops import HALF, ONE, Spin, _spin_matrices, as_direction, eigenbasis, fix_phase, rotation_operator
from .tensor_core import MAX_DIM, Operator, StateVector, state_from_terms

NULLSPACE_RTOL = 1e-9
_PIVOT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SingletBasis:
    n: int
    spin: Spin
    columns: tuple[StateVector, ...] = field(repr=False)
    tol: float

    @property
    def dim(self) -> int:
        return len(self.columns)

    @property
    def matrix(self) -> np.ndarray:
        """Columns stacked into a (d**n, dim) array."""
        if not self.columns:
            return np.zeros((self.spin.dim**self.n, 0), dtype=complex)
        return np.column_stack([c.amplitudes for c in self.columns])

    def projection_residual(self, psi: StateVector) -> float:
        """||psi - P psi|| for the orthogonal projector P onto the span."""
        b = self.matrix
        v = psi.amplitudes
        return float(np.linalg.norm(v - b @ (b.conj().T @ v)))


def _check_dim(n: int, s: Spin) -> None:
    if n < 1:
        raise ValueError(f"need at least one particle, got n={n}")
    if s.dim**n > MAX_DIM:
        raise ValueError(f"dimension {s.dim}**{n} exceeds {MAX_DIM}")


@lru_cache(maxsize=32)
def _total_components(n: int, two_j: int) -> tuple[np.ndarray, ...]:
    d = two_j + 1
    out = []
    for comp in _spin_matrices(two_j):
        acc = np.zeros((d**n, d**n), dtype=complex)
        for k in range(n):
            acc += np.kron(np.kron(np.eye(d**k), comp), np.eye(d ** (n - 1 - k)))
        acc.setflags(write=False)
        out.append(acc)
    return tuple(out)


def total_spin_component(n: int, s: Spin, axis: str) -> Operator:
    """Sum over sites of the embedded J^axis, axis one of "x", "y", "z"."""
    _check_dim(n, s)
    try:
        k = "xyz".index(axis)
    except ValueError:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None
    return Operator(_total_components(n, s.two_j)[k], hermitian=True)


def singlet_residual(psi: StateVector) -> float:
    """max over x, y, z of ||J_tot psi||."""
    comps = _total_components(psi.num_particles, psi.local_dim - 1)
    return max(float(np.linalg.norm(c @ psi.amplitudes)) for c in comps)


def _m_total(n: int, two_j: int) -> np.ndarray:
    """2 * (sum of m) for every flat basis index."""
    digits = np.indices((two_j + 1,) * n).reshape(n, -1)
    return (two_j * n - 2 * digits.sum(axis=0)).astype(int)


def _canonical_columns(span: np.ndarray) -> list[np.ndarray]:
    """Deterministic orthonormal basis of ``span`` (orthonormal columns).

    Basis kets are projected onto the span in flat-index order; the first ket
    with a non-negligible remainder seeds each new column, so the result
    depends only on the subspace, not on the SVD's arbitrary rotation.
    """
    k = span.shape[1]
    cols: list[np.ndarray] = []
    if k == 0:
        return cols
    proj = span @ span.conj().T
    for i in range(proj.shape[0]):
        v = proj[:, i].copy()
        for c in cols:
            v -= c * np.vdot(c, v)
        nrm = np.linalg.norm(v)
        if nrm > _PIVOT_TOL:
            cols.append(fix_phase(v / nrm))
            if len(cols) == k:
                break
    return cols


def singlet_basis(n: int, s: Spin, tol: float = NULLSPACE_RTOL, method: str = "sector") -> SingletBasis:
    """Orthonormal basis of the common kernel of the three total-spin components.

    Singular values below ``tol`` times the largest count as zero. With
    ``method="sector"`` the kernel of J_z is taken exactly (basis kets with
    zero total m) and the SVD runs on the stacked J_x, J_y restricted to it;
    ``method="full"`` stacks all three components over the whole space.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_dim(n, s)
    jx, jy, jz = _total_components(n, s.two_j)
    dim = s.dim**n
    if method == "sector":
        cols = np.flatnonzero(_m_total(n, s.two_j) == 0)
        embed = np.eye(dim)[:, cols]
        stacked = np.vstack([jx[:, cols], jy[:, cols]])
    elif method == "full":
        embed = np.eye(dim)
        stacked = np.vstack([jx, jy, jz])
    else:
        raise ValueError(f"unknown method {method!r}")
    if stacked.shape[1] == 0:
        return SingletBasis(n, s, (), tol)
    _, sv, vh = np.linalg.svd(stacked)
    cutoff = tol * sv[0] if sv.size and sv[0] > 0 else tol
    rank = int(np.sum(sv >= cutoff))
    kernel = embed @ vh[rank:].conj().T
    # the kernel from SVD is orthonormal; canonicalize for reproducibility
    columns = tuple(StateVector(n, s.dim, c) for c in _canonical_columns(kernel))
    return SingletBasis(n, s, columns, tol)


def singlet_multiplicity(n: int, s: Spin) -> int:
    """Number of independent total-spin-zero states of n spin-j particles.

    Exact integer recursion over the multiplicity table {2J: count}, coupling
    one more spin j at each step.
    """
    if n < 1:
        raise ValueError(f"need at least one particle, got n={n}")
    tj = s.two_j
    table = {tj: 1}
    for _ in range(n - 1):
        nxt: dict[int, int] = {}
        for two_big_j, mult in table.items():
            for t in range(abs(two_big_j - tj), two_big_j + tj + 1, 2):
                nxt[t] = nxt.get(t, 0) + mult
        table = nxt
    return table.get(0, 0)


# -- named states ------------------------------------------------------------

def _pair_product(left, right):
    """Expand a product of two sums of (label, coeff) pairs."""
    return [(la + lb, ca * cb) for la, ca in left for lb, cb in right]


def _two_singlet_terms(s: Spin):
    """(label, coeff) pairs of the unnormalized two-particle singlet sum_m (-1)^(j-m) |m, -m>."""
    d = s.dim
    terms = []
    for k in range(d):
        m = s.j - k
        terms.append(((m, -m), (-1) ** k))
    return terms


def _terms_psi_2_4_s2():
    sym = [("+-", 1.0), ("-+", 1.0)]
    c = 1 / sqrt(3)
    return [("++--", c), ("--++", c)] + [(lab, -0.5 * c * v) for lab, v in _pair_product(sym, sym)]


def _terms_psi_3_3():
    c = 1 / sqrt(6)
    return [("-+0", c), ("-0+", -c), ("+0-", c), ("+-0", -c), ("0-+", c), ("0+-", -c)]


def _terms_psi_3_4_s1():
    c = 1 / sqrt(5)
    terms = [("0000", c * 2 / 3), ("--++", c), ("++--", c)]
    terms += [(lab, -c / 2) for lab in ("-00+", "0-0+", "-0+0", "0-+0", "0+-0", "+0-0", "0+0-", "+00-")]
    terms += [(lab, c / 3) for lab in ("00-+", "-+00", "+-00", "00+-")]
    terms += [(lab, c / 6) for lab in ("-+-+", "+--+", "-++-", "+-+-")]
    return terms


def _terms_psi_3_4_s2():
    c = 1 / (2 * sqrt(3))
    signs = {
        "-00+": 1, "0-0+": -1, "0+0-": -1, "+00-": 1,
        "-0+0": -1, "0-+0": 1, "0+-0": 1, "+0-0": -1,
        "-++-": 1, "+-+-": -1, "-+-+": -1, "+--+": 1,
    }
    return [(lab, c * sgn) for lab, sgn in signs.items()]


# (n, spin, term builder) for fixed-size states; coefficients as printed
_FIXED = {
    "bell_2_2": (2, HALF, lambda: [("+-", 1 / sqrt(2)), ("-+", -1 / sqrt(2))]),
    "psi_2_4_s1": (4, HALF, lambda: [(lab, 0.5 * c) for lab, c in _pair_product(
        [("+-", 1), ("-+", -1)], [("+-", 1), ("-+", -1)])]),
    "psi_2_4_s2": (4, HALF, _terms_psi_2_4_s2),
    "psi_3_2": (2, ONE, lambda: [("+-", 1 / sqrt(3)), ("-+", 1 / sqrt(3)), ("00", -1 / sqrt(3))]),
    "psi_3_3": (3, ONE, _terms_psi_3_3),
    "psi_3_4_s1": (4, ONE, _terms_psi_3_4_s1),
    "psi_3_4_s2": (4, ONE, _terms_psi_3_4_s2),
    "ghz_mermin_4": (4, HALF, lambda: [("++++", 1 / sqrt(2)), ("----", 1 / sqrt(2))]),
    "product_plus_4": (4, HALF, lambda: [("++++", 1.0)]),
}
_ALIASES = {"psi_2_2_s": "bell_2_2", "psi_3_2_s": "psi_3_2", "psi_3_3_s": "psi_3_3"}
_PARAM = {"psi_2_2n_s1": HALF, "psi_3_2n_s3": ONE}

NAMED_STATES = tuple(_FIXED) + ("psi_2_2n_s1(n)", "psi_3_2n_s3(n)", "power_singlet(j,n)")
SINGLET_NAMES = ("bell_2_2", "psi_2_4_s1", "psi_2_4_s2", "psi_3_2", "psi_3_3", "psi_3_4_s1", "psi_3_4_s2")


def named_terms(identifier: str):
    """(n, spin, terms) for an identifier; ``terms`` are the printed coefficients."""
    ident = identifier.strip()
    ident = _ALIASES.get(ident, ident)
    if ident in _FIXED:
        n, s, build = _FIXED[ident]
        return n, s, build()
    m = re.fullmatch(r"(psi_2_2n_s1|psi_3_2n_s3)\((\d+)\)", ident)
    if m:
        s, pairs = _PARAM[m.group(1)], int(m.group(2))
        return _power_terms(s, pairs)
    m = re.fullmatch(r"power_singlet\(([\d/]+),\s*(\d+)\)", ident)
    if m:
        return _power_terms(Spin.parse(m.group(1)), int(m.group(2)))
    raise KeyError(f"unknown named state {identifier!r}; known: {', '.join(NAMED_STATES)}")


def _power_terms(s: Spin, n_pairs: int):
    if n_pairs < 1:
        raise ValueError("n_pairs must be at least 1")
    if s.dim ** (2 * n_pairs) > MAX_DIM:
        raise ValueError(f"dimension {s.dim}**{2 * n_pairs} exceeds {MAX_DIM}")
    c = 1 / sqrt(s.dim)
    pair = [(lab, c * v) for lab, v in _two_singlet_terms(s)]
    terms = pair
    for _ in range(n_pairs - 1):
        terms = _pair_product(terms, pair)
    return 2 * n_pairs, s, terms


def named_state_with_norm(identifier: str) -> tuple[StateVector, float]:
    n, s, terms = named_terms(identifier)
    return state_from_terms(terms, n, s.dim)


def named_state(identifier: str) -> StateVector:
    """State for a paper identifier, e.g. "psi_3_4_s1", "psi_2_2n_s1(3)", "power_singlet(1,2)".

    Raises KeyError for an unknown identifier and ValueError when the printed
    prefactors fail to give a unit vector.
    """
    psi, norm = named_state_with_norm(identifier)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"{identifier}: printed coefficients have norm {norm!r}, not 1")
    return psi


def power_singlet(s: Spin, n_pairs: int) -> StateVector:
    """n_pairs-fold tensor power of the two-particle spin-j singlet."""
    n, s, terms = _power_terms(s, n_pairs)
    return state_from_terms(terms, n, s.dim)[0]


# -- invariance and term counts --------------------------------------------

def rotation_invariance_residual(psi: StateVector, axis, angle: float) -> float:
    """||R^(x)n psi - psi|| for R = exp(-i angle axis.J) on every site."""
    s = Spin(psi.local_dim - 1)
    r = rotation_operator(s, axis, angle).matrix
    n = psi.num_particles
    rotated = kernels.transform_amplitudes(psi.amplitudes, np.broadcast_to(r.conj().T, (n,) + r.shape))
    return float(np.linalg.norm(rotated - psi.amplitudes))


def rotate_state(psi: StateVector, axis, angle: float) -> StateVector:
    s = Spin(psi.local_dim - 1)
    r = rotation_operator(s, axis, angle).matrix
    n = psi.num_particles
    out = kernels.transform_amplitudes(psi.amplitudes, np.broadcast_to(r.conj().T, (n,) + r.shape))
    return StateVector.normalized(out, n, psi.local_dim)


def amplitudes_along(psi: StateVector, direction) -> np.ndarray:
    """Amplitudes in the product eigenbasis of the spin along ``direction`` on every site."""
    u = eigenbasis(Spin(psi.local_dim - 1), direction)
    return kernels.transform_amplitudes(psi.amplitudes, np.broadcast_to(u, (psi.num_particles,) + u.shape))


def term_count(psi: StateVector, direction, tol: float = 1e-9) -> int:
    """Number of product-eigenbasis amplitudes along ``direction`` with magnitude above ``tol``."""
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    return int(np.sum(np.abs(amplitudes_along(psi, as_direction(direction))) > tol))
