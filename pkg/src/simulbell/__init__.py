"""Singlet subspaces, the uniqueness property and single-run CHSH schemes for spin-j particles."""
__version__ = "0.1.0"

from .spin_ops import HALF, ONE, X_HAT, Y_HAT, Z_HAT, Direction, Spin, rotation_operator, spin_along, spin_matrices
from .tensor_core import Operator, StateVector, embed_site_operator, kron, label_to_index, index_to_label, state_from_terms
from .singlet_space import (
    SingletBasis,
    named_state,
    power_singlet,
    rotation_invariance_residual,
    singlet_basis,
    singlet_multiplicity,
    term_count,
    total_spin_component,
)
from .uniqueness import conditional_after_measurement, is_unique, joint_distribution, nonuniqueness_score
from .bell_correlations import (
    ChshSetting,
    chsh_value,
    classical_chsh_max,
    pair_expectation,
    sample_outcomes,
    simultaneous_scheme_report,
)
from .search_opt import SearchConfig, SearchResult, minimize_score, parametrize
