"""Classical one-time pad, teleportation and superdense coding.

Bell basis ordering and phases are fixed as

    index 0: Phi+ = (|00> + |11>) / sqrt 2
    index 1: Phi- = (|00> - |11>) / sqrt 2
    index 2: Psi+ = (|01> + |10>) / sqrt 2
    index 3: Psi- = (|01> - |10>) / sqrt 2

Each Bell vector equals ``(I (x) X^a Z^b) Phi+`` with ``(a, b)`` given by the
binary digits of its index. Those ``(a, b)`` are the outcome's key bits.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .density import DensityMatrix, StateVector, pure_from_statevector, trace_distance
from .encryption import EncryptionSet, make_set
from .optimality import shannon_entropy
from .pauli import MAX_QUBITS, BitString, PauliString, as_bitstring, pauli_multiply, pauli_to_matrix

_S = 1 / np.sqrt(2)
BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")
BELL_VECTORS = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, _S, 0],
        [0, _S, -_S, 0],
    ],
    dtype=complex,
)
SINGLET_INDEX = 3


# ---------------------------------------------------------------------------
# Classical one-time pad
# ---------------------------------------------------------------------------


def classical_otp(message: str, key: str) -> str:
    """Bitwise XOR of two equal-length bit strings; its own inverse."""
    m, k = as_bitstring(message), as_bitstring(key)
    if m.n != k.n:
        raise ValueError(f"message has {m.n} bits but key has {k.n}")
    return str(m ^ k)


class DiscreteDistribution:
    """Finite distribution over hashable outcomes.

    Probabilities may be floats or :class:`fractions.Fraction`; arithmetic is
    carried out in whatever type is supplied, so rational inputs give exact
    marginals.
    """

    def __init__(self, outcomes, tol: float = 1e-12):
        merged = defaultdict(int)
        for value, prob in outcomes:
            if prob < 0:
                raise ValueError(f"negative probability {prob!r} for {value!r}")
            merged[value] += prob
        total = sum(merged.values())
        if abs(total - 1) > tol:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        self.outcomes = dict(merged)

    def items(self):
        return self.outcomes.items()

    def marginal(self, index: int) -> "DiscreteDistribution":
        """Marginal of component ``index`` of tuple-valued outcomes."""
        out = defaultdict(int)
        for value, prob in self.items():
            out[value[index]] += prob
        return DiscreteDistribution(out.items())

    def entropy(self) -> float:
        return shannon_entropy([float(p) for p in self.outcomes.values()])


def uniform_distribution(n_bits: int, exact: bool = True) -> DiscreteDistribution:
    p = Fraction(1, 2**n_bits) if exact else 1.0 / 2**n_bits
    return DiscreteDistribution((str(b), p) for b in _bitstrings(n_bits))


def _bitstrings(n_bits: int):
    return (BitString(bits) for bits in product((0, 1), repeat=n_bits))


def otp_joint(message_prior: DiscreteDistribution, key_dist: DiscreteDistribution):
    """Joint distribution of ``(m, c)`` with ``c = m XOR k`` and independent ``k``."""
    joint = []
    for m, pm in message_prior.items():
        for k, pk in key_dist.items():
            joint.append(((m, classical_otp(m, k)), pm * pk))
    return DiscreteDistribution(joint)


def mutual_information(joint: DiscreteDistribution) -> float:
    """``I(M; C)`` in bits for a distribution over ``(m, c)`` pairs.

    Computed by brute-force marginalization as
    ``sum p(m, c) log2(p(m, c) / (p(m) p(c)))``.
    """
    pm = joint.marginal(0).outcomes
    pc = joint.marginal(1).outcomes
    total = 0.0
    for (m, c), p in joint.items():
        if p == 0:
            continue
        ratio = p / (pm[m] * pc[c])
        total += float(p) * float(np.log2(float(ratio)))
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# Bell measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BellOutcome:
    index: int

    def __post_init__(self):
        if self.index not in range(4):
            raise ValueError(f"Bell outcome index must be 0..3, got {self.index}")

    @property
    def key_bits(self) -> tuple:
        return (self.index >> 1, self.index & 1)

    @property
    def label(self) -> str:
        return BELL_LABELS[self.index]

    @property
    def pauli(self) -> PauliString:
        a, b = self.key_bits
        return PauliString((a,), (b,))

    @classmethod
    def from_key_bits(cls, a: int, b: int) -> "BellOutcome":
        return cls(2 * a + b)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def bell_probabilities(state) -> np.ndarray:
    amps = state.amps if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    if amps.shape != (4,):
        raise ValueError("Bell measurement needs a two-qubit state vector")
    return np.abs(BELL_VECTORS.conj() @ amps) ** 2


def bell_measure(state, seed=None):
    """Measure two qubits in the Bell basis; returns ``(BellOutcome, probs)``."""
    probs = bell_probabilities(state)
    idx = int(_rng(seed).choice(4, p=probs / probs.sum()))
    return BellOutcome(idx), probs


# ---------------------------------------------------------------------------
# Teleportation
# ---------------------------------------------------------------------------


@dataclass
class TeleportBranch:
    """One measurement branch: outcome, its probability and Bob's states."""

    outcome: BellOutcome
    probability: float
    bob_pre: DensityMatrix
    bob_post: DensityMatrix

    @property
    def correction(self) -> PauliString:
        """The operator ``U_k`` with ``bob_pre = U_k rho U_k^dagger``."""
        return self.outcome.pauli


@dataclass
class TeleportResult:
    outcome: BellOutcome
    probabilities: np.ndarray
    bob_pre: DensityMatrix
    bob_post: DensityMatrix
    branches: list


def teleport_branches(message) -> list:
    """All four branches of one-qubit teleportation.

    Qubit 0 holds the message, qubits 1 (Alice) and 2 (Bob) share ``Phi+``.
    Alice projects qubits 0 and 1 onto each Bell vector; Bob's conditional
    state is then corrected with the adjoint of the outcome's Pauli.
    """
    if not isinstance(message, StateVector):
        message = StateVector(message)
    if message.n != 1:
        raise ValueError("teleportation is implemented for one message qubit")
    joint = np.kron(message.amps, BELL_VECTORS[0]).reshape(4, 2)  # (q0 q1), q2
    branches = []
    for idx in range(4):
        bob = BELL_VECTORS[idx].conj() @ joint
        prob = float(np.vdot(bob, bob).real)
        bob = bob / np.sqrt(prob)
        outcome = BellOutcome(idx)
        u = pauli_to_matrix(outcome.pauli)
        pre = pure_from_statevector(StateVector(bob))
        post = DensityMatrix.unchecked(u.conj().T @ pre.mat @ u)
        branches.append(TeleportBranch(outcome, prob, pre, post))
    return branches


def teleport_one_qubit(message, seed=None) -> TeleportResult:
    """Sample one teleportation run; the exact branches are attached."""
    branches = teleport_branches(message)
    probs = np.array([b.probability for b in branches])
    idx = int(_rng(seed).choice(4, p=probs / probs.sum()))
    chosen = branches[idx]
    return TeleportResult(chosen.outcome, probs, chosen.bob_pre, chosen.bob_post, branches)


def bob_marginal(branches: Sequence[TeleportBranch]) -> np.ndarray:
    """Bob's state before he learns the outcome."""
    return sum(b.probability * b.bob_pre.mat for b in branches)


def teleportation_encryption_set(branches: Sequence[TeleportBranch]) -> EncryptionSet:
    """The set ``{p_k, U_k}`` induced by Bob's uncorrected branch states."""
    return make_set([(b.probability, b.correction) for b in branches], n=1)


def teleport_fidelity_distance(message, result: TeleportResult) -> float:
    """Trace distance between the message and Bob's corrected state."""
    if not isinstance(message, StateVector):
        message = StateVector(message)
    return trace_distance(pure_from_statevector(message), result.bob_post)


# ---------------------------------------------------------------------------
# Superdense coding
# ---------------------------------------------------------------------------


def superdense_pair(a: int, b: int, seed=None):
    """Apply ``X^a Z^b`` to Bob's half of a singlet and Bell-measure both halves."""
    singlet = BELL_VECTORS[SINGLET_INDEX]
    op = np.kron(np.eye(2), pauli_to_matrix(PauliString((a,), (b,))))
    return bell_measure(op @ singlet, seed)


def _singlet_pauli() -> PauliString:
    return BellOutcome(SINGLET_INDEX).pauli


def decode_pair(outcome: BellOutcome) -> tuple:
    """Invert the outcome map: which ``X^a Z^b`` produced this Bell state.

    The measured state is ``(I (x) P_out) Phi+`` and the singlet is
    ``(I (x) P_s) Phi+``, so Bob's operation equals ``P_out P_s^dagger`` up
    to phase.
    """
    applied = pauli_multiply(outcome.pauli, _singlet_pauli().adjoint())
    return applied.alpha.bits[0], applied.beta.bits[0]


def superdense_recover_key(n: int, alpha, beta, seed=None):
    """Recover a one-time-pad key ``(alpha, beta)`` through ``n`` singlets.

    Every pair is simulated independently. Returns the recovered
    ``(alpha, beta)`` as bit strings and the per-pair outcome probabilities.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in [1, {MAX_QUBITS}], got {n}")
    alpha, beta = as_bitstring(alpha, n), as_bitstring(beta, n)
    rng = _rng(seed)
    rec_a, rec_b, all_probs = [], [], []
    for a, b in zip(alpha.bits, beta.bits):
        outcome, probs = superdense_pair(a, b, rng)
        ra, rb = decode_pair(outcome)
        rec_a.append(ra)
        rec_b.append(rb)
        all_probs.append(probs)
    return (BitString(rec_a), BitString(rec_b)), np.array(all_probs)
