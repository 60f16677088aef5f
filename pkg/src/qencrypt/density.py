"""Validated quantum states and the state-level utilities used by the protocols."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .pauli import MAX_QUBITS, num_qubits

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-9

_PAULI_HERMITIAN = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class InvalidStateError(ValueError):
    """Raised when an array does not describe a valid quantum state."""


def _check_n(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidStateError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


class StateVector:
    """A normalized pure state on ``n`` qubits."""

    def __init__(self, amps, tol: float = NORM_TOL):
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        try:
            self.n = num_qubits(amps.size)
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from None
        _check_n(self.n)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > tol:
            raise InvalidStateError(f"state vector norm is {norm:.3e}, expected 1")
        self.amps = amps
        self.amps.setflags(write=False)

    @classmethod
    def basis(cls, index: int, n: int) -> "StateVector":
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def random(cls, n: int, seed=None) -> "StateVector":
        """Haar-random pure state from a complex Gaussian vector."""
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        return cls(v / np.linalg.norm(v))

    def __repr__(self):
        return f"StateVector(n={self.n}, amps={np.round(self.amps, 6)!r})"


class DensityMatrix:
    """A Hermitian, unit-trace, positive semidefinite matrix of dimension ``2**n``.

    Validation happens once, at construction. Use :meth:`unchecked` only for
    values that are correct by construction.
    """

    def __init__(self, mat, tol: float = PSD_TOL):
        mat = np.array(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {mat.shape}")
        try:
            self.n = num_qubits(mat.shape[0])
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from None
        _check_n(self.n)
        if np.linalg.norm(mat - mat.conj().T) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace is {tr:.6g}, expected 1")
        lam_min = np.linalg.eigvalsh((mat + mat.conj().T) / 2).min()
        if lam_min < -tol:
            raise InvalidStateError(f"density matrix has eigenvalue {lam_min:.3e} < 0")
        self.mat = mat
        self.mat.setflags(write=False)

    @classmethod
    def unchecked(cls, mat) -> "DensityMatrix":
        obj = cls.__new__(cls)
        obj.mat = np.array(mat, dtype=complex)
        obj.mat.setflags(write=False)
        obj.n = num_qubits(obj.mat.shape[0])
        return obj

    @property
    def dim(self) -> int:
        return 2**self.n

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def allclose(self, other, tol: float = 1e-9) -> bool:
        """Frobenius-norm equality within ``tol``."""
        return bool(np.linalg.norm(self.mat - as_matrix(other)) <= tol)

    def __repr__(self):
        return f"DensityMatrix(n={self.n}, mat={np.round(self.mat, 6)!r})"


def as_matrix(state) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return state.mat
    if isinstance(state, StateVector):
        return np.outer(state.amps, state.amps.conj())
    return np.asarray(state, dtype=complex)


def totally_mixed(n: int) -> DensityMatrix:
    _check_n(n)
    return DensityMatrix.unchecked(np.eye(2**n) / 2**n)


def pure_from_statevector(v) -> DensityMatrix:
    """Projector ``|v><v|``; ``v`` may be a StateVector or an amplitude array."""
    if not isinstance(v, StateVector):
        v = StateVector(v)
    return DensityMatrix.unchecked(np.outer(v.amps, v.amps.conj()))


def random_density(n: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Reproducible random state of the given rank.

    Mixes ``rank`` Haar-random pure states with Dirichlet-distributed
    weights. Generic pure vectors are linearly independent, so the result has
    the requested rank almost surely. ``rank=None`` means full rank.
    """
    _check_n(n)
    d = 2**n
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise InvalidStateError(f"rank must be in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((rank, d)) + 1j * rng.standard_normal((rank, d))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    weights = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
    mat = np.einsum("k,ki,kj->ij", weights, vecs, vecs.conj())
    mat = (mat + mat.conj().T) / 2
    return DensityMatrix(mat / np.trace(mat).real)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    if a.n + b.n > MAX_QUBITS:
        raise InvalidStateError(f"combined qubit count {a.n + b.n} exceeds {MAX_QUBITS}")
    return DensityMatrix.unchecked(np.kron(a.mat, b.mat))


def tensor_all(states: Iterable[DensityMatrix]) -> DensityMatrix:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def bloch_state(axis: str) -> DensityMatrix:
    """Single-qubit ``(I + sigma_axis) / 2`` for axis in x, y, z; ``"m"`` gives ``I/2``."""
    if axis == "m":
        return totally_mixed(1)
    return DensityMatrix.unchecked((np.eye(2) + _PAULI_HERMITIAN[axis]) / 2)


def product_state(labels: str) -> DensityMatrix:
    """Tensor product of ``bloch_state`` factors, e.g. ``"mxz"`` on 3 qubits."""
    return tensor_all(bloch_state(c) for c in labels)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the qubits in ``keep`` (output in ascending qubit order)."""
    keep = sorted(set(int(q) for q in keep))
    if not keep or keep[0] < 0 or keep[-1] >= rho.n:
        raise InvalidStateError(f"invalid qubit indices {keep} for n={rho.n}")
    n = rho.n
    t = rho.mat.reshape((2,) * (2 * n))
    # axes 0..n-1 are row qubits, n..2n-1 column qubits; trace from the right
    current = n
    for q in reversed(range(n)):
        if q not in keep:
            t = np.trace(t, axis1=q, axis2=q + current)
            current -= 1
    d = 2 ** len(keep)
    return DensityMatrix.unchecked(t.reshape(d, d))


def trace_distance(a, b) -> float:
    """``(1/2) * sum |eig(a - b)|``; accepts DensityMatrix or arrays."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise InvalidStateError(f"state shapes differ: {ma.shape} vs {mb.shape}")
    diff = ma - mb
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def fidelity_pure(v: StateVector, rho) -> float:
    """``<v| rho |v>`` for a pure reference state."""
    return float(np.real(v.amps.conj() @ as_matrix(rho) @ v.amps))
