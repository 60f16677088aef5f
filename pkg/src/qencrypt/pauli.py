"""Phase-tracked algebra of the operators X^alpha Z^beta.

Conventions used throughout the package:

* Qubit 0 is the leftmost tensor factor. For a bit string ``b`` of length
  ``n`` the integer encoding is ``int("".join(b), 2)``, so bit ``i`` of the
  string is bit ``n - 1 - i`` of the integer and lexicographic order on bit
  strings coincides with integer order.
* A :class:`PauliString` stands for ``i**ipow * X^alpha Z^beta`` with the X
  factor applied after the Z factor (``X^alpha`` is on the left). This is the
  raw, generally non-Hermitian basis; no ``Y`` relabelling is done.

Some texts index ``X^alpha`` by the decimal value of ``alpha`` (for example
``X^3`` for ``X^{0...011}``). :meth:`BitString.from_int` gives that alias.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Union

import numpy as np

MAX_QUBITS = 5

_PHASE_LABELS = {0: "+1", 1: "+i", 2: "-1", 3: "-i"}
_LABEL_POWERS = {label: power for power, label in _PHASE_LABELS.items()}


def _popcount(x):
    """Elementwise population count for integer scalars or arrays."""
    x = np.asarray(x, dtype=np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


@dataclass(frozen=True)
class BitString:
    """An ordered string of ``n`` bits, one per qubit."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("bit string must have at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bit values must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        if not 0 <= value < 2**n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls(tuple((value >> (n - 1 - i)) & 1 for i in range(n)))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.bits)

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def weight(self) -> int:
        return sum(self.bits)

    def _check_length(self, other: "BitString"):
        if self.n != other.n:
            raise ValueError(f"bit string lengths differ: {self.n} != {other.n}")

    def __xor__(self, other: "BitString") -> "BitString":
        self._check_length(other)
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def dot(self, other: "BitString") -> int:
        """Inner product modulo 2."""
        self._check_length(other)
        return sum(a & b for a, b in zip(self.bits, other.bits)) & 1

    def __iter__(self):
        return iter(self.bits)

    def __len__(self):
        return self.n

    def __str__(self):
        return "".join(str(b) for b in self.bits)


def as_bitstring(value, n: int | None = None) -> BitString:
    """Coerce a ``BitString``, ``"0101"``-style string or bit sequence."""
    if isinstance(value, BitString):
        result = value
    elif isinstance(value, str):
        result = BitString.from_str(value)
    elif isinstance(value, (int, np.integer)):
        if n is None:
            raise ValueError("an integer bit string needs an explicit length")
        result = BitString.from_int(int(value), n)
    else:
        result = BitString(tuple(value))
    if n is not None and result.n != n:
        raise ValueError(f"expected {n} bits, got {result.n}")
    return result


def all_bitstrings(n: int) -> Iterator[BitString]:
    """All ``2**n`` bit strings of length ``n`` in lexicographic order."""
    for bits in product((0, 1), repeat=n):
        yield BitString(bits)


@dataclass(frozen=True)
class PauliString:
    """The operator ``i**ipow * X^alpha Z^beta`` on ``n`` qubits."""

    alpha: BitString
    beta: BitString
    ipow: int = 0

    def __post_init__(self):
        alpha = as_bitstring(self.alpha)
        beta = as_bitstring(self.beta)
        if alpha.n != beta.n:
            raise ValueError(f"alpha and beta lengths differ: {alpha.n} != {beta.n}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "ipow", int(self.ipow) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(BitString.zeros(n), BitString.zeros(n))

    @classmethod
    def from_phase(cls, alpha, beta, phase: Union[str, complex]) -> "PauliString":
        """Build from a phase given as ``"+1"``, ``"-i"``, ... or a complex unit."""
        if isinstance(phase, str):
            try:
                power = _LABEL_POWERS[phase]
            except KeyError:
                raise ValueError(f"unknown phase label {phase!r}") from None
        else:
            matches = [p for p in range(4) if abs(1j**p - phase) < 1e-12]
            if not matches:
                raise ValueError(f"phase must be one of +-1, +-i, got {phase!r}")
            power = matches[0]
        return cls(alpha, beta, power)

    @property
    def n(self) -> int:
        return self.alpha.n

    @property
    def phase(self) -> complex:
        return 1j**self.ipow

    @property
    def phase_label(self) -> str:
        return _PHASE_LABELS[self.ipow]

    @property
    def key(self) -> tuple:
        """The phase-free label ``(alpha, beta)``."""
        return (self.alpha, self.beta)

    def to_matrix(self) -> np.ndarray:
        return pauli_to_matrix(self)

    def adjoint(self) -> "PauliString":
        # (X^a Z^b)^dagger = Z^b X^a = (-1)^{a.b} X^a Z^b
        sign_pow = 2 * self.alpha.dot(self.beta)
        return PauliString(self.alpha, self.beta, -self.ipow + sign_pow)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def __str__(self):
        return f"{self.phase_label}*X^{self.alpha}Z^{self.beta}"


def all_pauli_strings(n: int) -> Iterator[PauliString]:
    """The ``4**n`` phase-1 strings, ordered by ``(alpha, beta)``."""
    for alpha in all_bitstrings(n):
        for beta in all_bitstrings(n):
            yield PauliString(alpha, beta)


@lru_cache(maxsize=None)
def sign_table(n: int) -> np.ndarray:
    """``table[b, j] = (-1)^{b.j}`` for integer-encoded ``n``-bit strings."""
    idx = np.arange(2**n)
    table = (1 - 2 * (_popcount(idx[:, None] & idx[None, :]) & 1)).astype(np.int64)
    table.setflags(write=False)
    return table


def pauli_to_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of ``phase * X^alpha Z^beta``."""
    d = 2**p.n
    a, b = p.alpha.to_int(), p.beta.to_int()
    cols = np.arange(d)
    mat = np.zeros((d, d), dtype=complex)
    mat[cols ^ a, cols] = p.phase * sign_table(p.n)[b]
    return mat


def pauli_multiply(p1: PauliString, p2: PauliString) -> PauliString:
    """Product ``p1 * p2`` as a phase-tracked string.

    Moving ``Z^beta1`` past ``X^alpha2`` contributes ``(-1)^{beta1.alpha2}``.
    """
    if p1.n != p2.n:
        raise ValueError(f"qubit counts differ: {p1.n} != {p2.n}")
    sign_pow = 2 * p1.beta.dot(p2.alpha)
    return PauliString(
        p1.alpha ^ p2.alpha, p1.beta ^ p2.beta, p1.ipow + p2.ipow + sign_pow
    )


def commutation_phase(alpha, beta, gamma, delta) -> int:
    """Sign picked up when ``X^gamma Z^delta`` conjugates ``X^alpha Z^beta``.

    Returns ``s`` in ``{+1, -1}`` with
    ``(X^g Z^d)(X^a Z^b)(X^g Z^d)^dagger = s * X^a Z^b``.
    """
    alpha, beta, gamma, delta = map(as_bitstring, (alpha, beta, gamma, delta))
    exponent = alpha.dot(delta) ^ gamma.dot(beta)
    return -1 if exponent else 1


def _dense(m) -> np.ndarray:
    if isinstance(m, PauliString):
        return pauli_to_matrix(m)
    return np.asarray(m, dtype=complex)


def num_qubits(dim: int) -> int:
    """Qubit count for a matrix dimension; raises unless ``dim`` is ``2**n``."""
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def hs_inner(m1, m2) -> complex:
    """Hilbert-Schmidt inner product ``Tr(m1 m2^dagger)``."""
    a, b = _dense(m1), _dense(m2)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    return complex(np.vdot(b, a))


@dataclass(frozen=True, eq=False)
class PauliCoefficients:
    """Expansion coefficients ``a[alpha, beta]`` of a matrix in the raw basis.

    ``coeffs`` is a ``2**n x 2**n`` array indexed by the integer encodings of
    alpha (row) and beta (column). Indexing the object also accepts bit
    strings: ``c["01", "10"]``.
    """

    n: int
    coeffs: np.ndarray

    def __getitem__(self, key):
        alpha, beta = key
        a = as_bitstring(alpha, self.n).to_int()
        b = as_bitstring(beta, self.n).to_int()
        return complex(self.coeffs[a, b])

    def nonzero(self, tol: float = 1e-12) -> dict:
        """``{(alpha, beta): a}`` for coefficients above ``tol`` in modulus."""
        out = {}
        for a, b in zip(*np.nonzero(np.abs(self.coeffs) > tol)):
            key = (BitString.from_int(int(a), self.n), BitString.from_int(int(b), self.n))
            out[key] = complex(self.coeffs[a, b])
        return out


def _expand_batch(mats: np.ndarray) -> np.ndarray:
    """Coefficients for a stack of matrices, shape ``(..., 2**n, 2**n)``.

    Uses ``Tr(m Z^b X^a) = sum_j m[j ^ a, j] (-1)^{b.j}``: gather the
    ``a``-shifted diagonal of ``m`` and apply a Walsh-Hadamard sign transform.
    """
    d = mats.shape[-1]
    n = num_qubits(d)
    j = np.arange(d)
    rows = j[None, :] ^ j[:, None]  # rows[a, j] = j ^ a
    shifted = mats[..., rows, j[None, :]]  # shifted[..., a, j] = m[j ^ a, j]
    return shifted @ sign_table(n).T / d


def expand_in_pauli(m) -> PauliCoefficients:
    """Expand ``m`` as ``sum a[alpha, beta] X^alpha Z^beta``.

    ``a[alpha, beta] = Tr(m Z^beta X^alpha) / 2**n``.

    Raises:
        ValueError: if ``m`` is not square with power-of-two dimension.
    """
    mat = _dense(m)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    n = num_qubits(mat.shape[0])
    return PauliCoefficients(n, _expand_batch(mat))


def reconstruct_from_coeffs(c: PauliCoefficients) -> np.ndarray:
    """Dense ``sum a[alpha, beta] X^alpha Z^beta``."""
    d = 2**c.n
    coeffs = np.asarray(c.coeffs, dtype=complex)
    if coeffs.shape != (d, d):
        raise ValueError(f"coefficient array must be {d}x{d}, got {coeffs.shape}")
    # inverse of _expand_batch: m[j ^ a, j] = sum_b a[a, b] (-1)^{b.j}
    j = np.arange(d)
    shifted = coeffs @ sign_table(c.n)
    mat = np.zeros((d, d), dtype=complex)
    mat[j[None, :] ^ j[:, None], j[None, :]] = shifted
    return mat


def pauli_basis_matrices(n: int) -> np.ndarray:
    """Stack of the ``4**n`` phase-1 basis matrices in ``(alpha, beta)`` order."""
    return np.stack([pauli_to_matrix(p) for p in all_pauli_strings(n)])

