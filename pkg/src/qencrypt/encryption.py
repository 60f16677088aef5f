"""Encryption sets ``{p_k, U_k}``: construction, application and security checks.

A set is secure when the keyed mixture ``sum_k p_k U_k rho U_k^dagger`` sends
every state to ``I / 2**n``. Two independent checkers are provided:

* :func:`check_security_basis` evaluates the mixture on every basis operator
  ``X^alpha Z^beta`` and requires all non-identity images to vanish. This is
  a finite, exact criterion equivalent to security on all states.
* :func:`check_security_sampled` pushes actual density matrices through
  :func:`encrypt_channel` and measures the trace distance to the totally
  mixed state.

A one-time pad key must not be reused across messages; nothing here models
key reuse.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from .density import (
    DensityMatrix,
    as_matrix,
    product_state,
    random_density,
    totally_mixed,
    trace_distance,
)
from .pauli import (
    MAX_QUBITS,
    BitString,
    PauliString,
    all_pauli_strings,
    as_bitstring,
    num_qubits,
    pauli_basis_matrices,
    pauli_to_matrix,
    sign_table,
)

PROB_TOL = 1e-12
UNITARY_TOL = 1e-9
SECURITY_TOL = 1e-9


class InvalidEncryptionSetError(ValueError):
    """Raised when entries do not form a valid encryption set."""


def _check_n(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidEncryptionSetError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


def _op_qubits(op) -> int:
    if isinstance(op, PauliString):
        return op.n
    mat = np.asarray(op)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidEncryptionSetError(f"operator must be a square matrix, got {mat.shape}")
    try:
        return num_qubits(mat.shape[0])
    except ValueError as exc:
        raise InvalidEncryptionSetError(str(exc)) from None


class EncryptionSet:
    """An immutable list of ``(probability, operator)`` entries.

    Operators are kept as given: :class:`PauliString` entries stay symbolic,
    dense entries are stored as read-only complex arrays. :attr:`matrices`
    densifies on demand.
    """

    def __init__(self, probs, ops, n: int):
        self.n = n
        self.probs = np.asarray(probs, dtype=float)
        self.probs.setflags(write=False)
        self.ops = tuple(ops)
        self._dense = None

    @property
    def M(self) -> int:
        return len(self.ops)

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def is_symbolic(self) -> bool:
        return all(isinstance(op, PauliString) for op in self.ops)

    @property
    def entries(self):
        return list(zip(self.probs.tolist(), self.ops))

    @property
    def matrices(self) -> np.ndarray:
        """Stack of dense operators, shape ``(M, 2**n, 2**n)``."""
        if self._dense is None:
            dense = np.stack(
                [pauli_to_matrix(op) if isinstance(op, PauliString) else op for op in self.ops]
            )
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def __len__(self):
        return self.M

    def __repr__(self):
        kind = "symbolic" if self.is_symbolic else "dense"
        return f"EncryptionSet(n={self.n}, M={self.M}, {kind})"


def make_set(entries, n: Optional[int] = None, tol: float = UNITARY_TOL) -> EncryptionSet:
    """Validate ``[(p_k, U_k), ...]`` and build an :class:`EncryptionSet`.

    Each ``U_k`` is a :class:`PauliString` or a square unitary matrix.

    Raises:
        InvalidEncryptionSetError: on an empty set, negative probabilities,
            probabilities not summing to 1, a non-unitary operator or mixed
            dimensions.
    """
    entries = list(entries)
    if not entries:
        raise InvalidEncryptionSetError("encryption set is empty")
    probs, ops = [], []
    for p, op in entries:
        p = float(p)
        if not np.isfinite(p) or p < 0:
            raise InvalidEncryptionSetError(f"invalid probability {p!r}")
        probs.append(p)
        if not isinstance(op, PauliString):
            op = np.array(op, dtype=complex)
        ops.append(op)

    dims = {_op_qubits(op) for op in ops}
    if len(dims) != 1:
        raise InvalidEncryptionSetError(f"operators act on different qubit counts: {sorted(dims)}")
    (m,) = dims
    if n is not None and n != m:
        raise InvalidEncryptionSetError(f"operators act on {m} qubits, expected {n}")
    _check_n(m)

    total = sum(probs)
    if abs(total - 1.0) > PROB_TOL:
        raise InvalidEncryptionSetError(f"probabilities sum to {total!r}, expected 1")

    eye = np.eye(2**m)
    for k, op in enumerate(ops):
        if isinstance(op, PauliString):
            continue
        err = np.linalg.norm(op @ op.conj().T - eye)
        if err > tol:
            raise InvalidEncryptionSetError(f"operator {k} is not unitary (|UU^+ - I| = {err:.3e})")
        op.setflags(write=False)
    return EncryptionSet(probs, ops, m)


def qotp(n: int) -> EncryptionSet:
    """Quantum one-time pad: all ``4**n`` strings ``X^alpha Z^beta``, uniformly.

    Key ``k`` encodes ``(alpha, beta)`` as ``k = alpha * 2**n + beta``.
    """
    _check_n(n)
    ops = list(all_pauli_strings(n))
    return EncryptionSet(np.full(len(ops), 1.0 / len(ops)), ops, n)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-random ``2**n x 2**n`` unitary."""
    return unitary_group.rvs(2**n, random_state=np.random.default_rng(seed))


def conjugated_basis(n: int, v=None, seed=None) -> EncryptionSet:
    """Uniform set ``{V X^alpha Z^beta V^dagger}`` for a unitary ``V``.

    Conjugation preserves the Hilbert-Schmidt inner product, so the result is
    again an orthogonal unitary basis. ``v=None`` draws ``V`` at random.
    """
    _check_n(n)
    if v is None:
        v = random_unitary(n, seed)
    v = np.asarray(v, dtype=complex)
    if v.shape != (2**n, 2**n):
        raise InvalidEncryptionSetError(f"conjugating unitary must be {2**n}x{2**n}")
    if np.linalg.norm(v @ v.conj().T - np.eye(2**n)) > UNITARY_TOL:
        raise InvalidEncryptionSetError("conjugating matrix is not unitary")
    basis = pauli_basis_matrices(n)
    mats = v[None] @ basis @ v.conj().T[None]
    p = 1.0 / len(basis)
    return make_set([(p, m) for m in mats], n=n)


def _check_key(s: EncryptionSet, k: int):
    if not 0 <= k < s.M:
        raise IndexError(f"key {k} out of range for a set of {s.M} entries")


def _require_n(s: EncryptionSet, rho):
    mat = as_matrix(rho)
    if mat.shape != (s.dim, s.dim):
        raise InvalidEncryptionSetError(
            f"state of shape {mat.shape} does not match an {s.n}-qubit set"
        )
    return mat


def encrypt_channel(s: EncryptionSet, rho) -> DensityMatrix:
    """Cipher state ``sum_k p_k U_k rho U_k^dagger``."""
    mat = _require_n(s, rho)
    u = s.matrices
    out = np.einsum("k,kij,jl,kml->im", s.probs, u, mat, u.conj(), optimize=True)
    return DensityMatrix.unchecked(out)


def encrypt_with_key(s: EncryptionSet, k: int, rho) -> DensityMatrix:
    _check_key(s, k)
    u = s.matrices[k]
    return DensityMatrix.unchecked(u @ _require_n(s, rho) @ u.conj().T)


def decrypt_with_key(s: EncryptionSet, k: int, rho) -> DensityMatrix:
    _check_key(s, k)
    u = s.matrices[k]
    return DensityMatrix.unchecked(u.conj().T @ _require_n(s, rho) @ u)


def key_index(n: int, alpha, beta) -> int:
    """The :func:`qotp` key index of ``(alpha, beta)``."""
    return as_bitstring(alpha, n).to_int() * 2**n + as_bitstring(beta, n).to_int()


@dataclass
class SecurityReport:
    """Verdict of a security check.

    ``max_residual`` is the largest Frobenius norm of a basis image that
    should vanish (or deviation of the identity image) for the basis check,
    and the largest trace distance to ``I / 2**n`` for the sampled check.
    ``witness`` is the ``(alpha, beta)`` pair attaining it; ``witness_state``
    labels the worst sampled state.
    """

    secure: bool
    max_residual: float
    tol: float
    method: str
    witness: Optional[tuple] = None
    witness_state: Optional[str] = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {
            "secure": self.secure,
            "method": self.method,
            "max_residual": float(self.max_residual),
            "tol": self.tol,
            "witness": None
            if self.witness is None
            else {"alpha": str(self.witness[0]), "beta": str(self.witness[1])},
            "witness_state": self.witness_state,
            "checked": self.checked,
        }


def basis_residuals_symbolic(s: EncryptionSet) -> np.ndarray:
    """Residual norms of all basis images for an all-Pauli set.

    The image of ``X^a Z^b`` under the mixture is ``c * X^a Z^b`` with
    ``c = sum_k p_k (-1)^{a.d_k + g_k.b}`` for keys ``X^g_k Z^d_k``; the
    key phases cancel between ``U`` and ``U^dagger``. Returns a
    ``2**n x 2**n`` array indexed by ``[alpha, beta]``.
    """
    n, d = s.n, s.dim
    signs = sign_table(n)
    gam = np.array([op.alpha.to_int() for op in s.ops])
    dlt = np.array([op.beta.to_int() for op in s.ops])
    # coeff[a, b] = sum_k p_k (-1)^{a.delta_k} (-1)^{gamma_k.b}
    coeff = np.einsum("k,ak,kb->ab", s.probs, signs[:, dlt], signs[gam, :])
    residual = np.abs(coeff) * np.sqrt(d)
    residual[0, 0] = abs(coeff[0, 0] - 1.0) * np.sqrt(d)
    return residual


def superoperator(s: EncryptionSet) -> np.ndarray:
    """Row-major superoperator ``sum_k p_k U_k (x) conj(U_k)``."""
    u = s.matrices
    d = s.dim
    return np.einsum("k,kij,klm->iljm", s.probs, u, u.conj()).reshape(d * d, d * d)


def basis_residuals_dense(s: EncryptionSet) -> np.ndarray:
    """Residual norms of all basis images, by dense matrix arithmetic."""
    n, d = s.n, s.dim
    basis = pauli_basis_matrices(n).reshape(4**n, d * d)
    images = basis @ superoperator(s).T  # row j: vec of image of basis element j
    images[0] -= np.eye(d).reshape(-1)
    return np.linalg.norm(images, axis=1).reshape(2**n, 2**n)


def check_security_basis(
    s: EncryptionSet, tol: float = SECURITY_TOL, method: str = "auto"
) -> SecurityReport:
    """Check that every non-identity ``X^alpha Z^beta`` is mapped to zero.

    ``method`` is ``"symbolic"`` (all-Pauli sets only), ``"dense"`` or
    ``"auto"``. The witness is the lexicographically first ``(alpha, beta)``
    attaining the largest residual, reported only for insecure sets.
    """
    if method == "auto":
        method = "symbolic" if s.is_symbolic else "dense"
    if method == "symbolic":
        if not s.is_symbolic:
            raise ValueError("symbolic evaluation requires Pauli-string operators")
        residual = basis_residuals_symbolic(s)
    elif method == "dense":
        residual = basis_residuals_dense(s)
    else:
        raise ValueError(f"unknown method {method!r}")
    worst = float(residual.max())
    secure = worst <= tol
    witness = None
    if not secure:
        a, b = np.unravel_index(int(np.argmax(residual)), residual.shape)
        witness = (BitString.from_int(int(a), s.n), BitString.from_int(int(b), s.n))
    return SecurityReport(secure, worst, tol, f"basis/{method}", witness, None, residual.size)


def structured_states(n: int):
    """All ``4**n`` products of ``I/2``, ``(I+X)/2``, ``(I+Y)/2``, ``(I+Z)/2``.

    These span the operator space, so a set mapping all of them to
    ``I / 2**n`` is secure. Yields ``(label, state)``.
    """
    for labels in product("mxyz", repeat=n):
        label = "".join(labels)
        yield label, product_state(label)


def check_security_sampled(
    s: EncryptionSet,
    num_states: int = 50,
    seed=None,
    tol: float = SECURITY_TOL,
    structured: bool = True,
) -> SecurityReport:
    """Encrypt test states and compare each output with ``I / 2**n``.

    Test states are ``num_states`` random densities of random rank plus, if
    ``structured``, the product states from :func:`structured_states`.
    """
    rng = np.random.default_rng(seed)
    target = totally_mixed(s.n)
    states = []
    for i in range(num_states):
        rank = int(rng.integers(1, s.dim + 1))
        states.append((f"random:{i}", random_density(s.n, rng, rank)))
    if structured:
        states.extend(structured_states(s.n))

    worst, worst_label = 0.0, None
    for label, rho in states:
        dist = trace_distance(encrypt_channel(s, rho), target)
        if dist > worst:
            worst, worst_label = dist, label
    secure = worst <= tol
    return SecurityReport(
        secure, worst, tol, "sampled", None, None if secure else worst_label, len(states)
    )


def hs_gram(ops: Sequence) -> np.ndarray:
    """Normalized Gram matrix ``Tr(U_j U_k^dagger) / 2**n`` of a list of operators."""
    mats = np.stack([pauli_to_matrix(op) if isinstance(op, PauliString) else op for op in ops])
    d = mats.shape[-1]
    flat = mats.reshape(len(mats), -1)
    return flat @ flat.conj().T / d
