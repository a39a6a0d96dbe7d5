"""Lacunary variation and oscillation functionals of ergodic averages.

Finite-dimensional models: unitary and contraction operators on C^d, the
scalar symbol ``a_n(e^{i theta})`` they reduce to, and a finite unitary
dilation that links the two.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .averages import (
    CheckpointPlan,
    average_doubling,
    average_stream,
    contraction_oscillation,
    contraction_variation,
    make_plan,
    oscillation_sum,
    variation_sum,
)
from .dilation import build_dilation, defects, verify_dilation
from .errors import (
    ContractViolation,
    InvalidArgument,
    NotLacunaryError,
    NotPositiveSemidefinite,
    ResourceError,
    VarOscError,
)
from .linalg import (
    Operator,
    is_unitary,
    make_diagonal_unitary,
    operator_norm,
    psd_sqrt,
    random_contraction,
    random_unitary,
)
from .sequences import LacunarySeq, geometric_lacunary, validate_lacunary, window
from .symbol import (
    chord_lower_bound_audit,
    decompose,
    kernel_audit,
    sweep_sup,
    symbol_at,
    symbol_oscillation,
    symbol_variation,
)
