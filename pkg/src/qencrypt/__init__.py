"""Quantum one-time pads: construction, security checks and key-size bounds."""

from .density import (
    DensityMatrix,
    InvalidStateError,
    StateVector,
    partial_trace,
    pure_from_statevector,
    random_density,
    tensor,
    totally_mixed,
    trace_distance,
)
from .encryption import (
    EncryptionSet,
    InvalidEncryptionSetError,
    SecurityReport,
    check_security_basis,
    check_security_sampled,
    conjugated_basis,
    decrypt_with_key,
    encrypt_channel,
    encrypt_with_key,
    make_set,
    qotp,
)
from .optimality import (
    CoefficientMatrix,
    OptimalityReport,
    analyze,
    build_gram_constraint_operator,
    check_gram,
    coefficient_matrix,
    shannon_entropy,
)
from .pauli import (
    BitString,
    PauliCoefficients,
    PauliString,
    commutation_phase,
    expand_in_pauli,
    hs_inner,
    pauli_multiply,
    pauli_to_matrix,
    reconstruct_from_coeffs,
)

__version__ = "0.1.0"
