"""Lower bounds on the key material of secure encryption sets, checked numerically.

For a secure set, write ``sqrt(p_k) U_k = sum C[k, (alpha, beta)] X^alpha Z^beta``.
Security forces ``C^dagger C = I / 4**n``. From that:

* ``M >= 4**n`` (rank),
* every ``p_k = (C C^dagger)[k, k] <= 1 / 4**n``, so ``H(p) >= 2n`` bits,
* when ``M == 4**n`` the probabilities are uniform and the ``U_k`` form an
  orthonormal basis.

:func:`analyze` evaluates all of these for a concrete set.
:func:`build_gram_constraint_operator` constructs the signed linear map whose
orthogonality yields the Gram identity, so that step can be checked too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .encryption import (
    SECURITY_TOL,
    EncryptionSet,
    SecurityReport,
    check_security_basis,
    hs_gram,
)
from .pauli import _expand_batch, _popcount

GRAM_TOL = 1e-9
ENTROPY_TOL = 1e-9
PROB_BOUND_TOL = 1e-12
SPECTRUM_TOL = 1e-9
# SVD is skipped for sets with more rows than SVD_ROW_FACTOR * 4**n
SVD_ROW_FACTOR = 4
MAX_OPERATOR_QUBITS = 3


def shannon_entropy(probs) -> float:
    """Entropy in bits, with ``0 log 0 = 0``."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """``M x 4**n`` matrix; row ``k`` expands ``sqrt(p_k) U_k``.

    Column ``alpha * 2**n + beta`` holds the coefficient of ``X^alpha Z^beta``.
    """

    n: int
    entries: np.ndarray

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    def row_coefficients(self, k: int) -> np.ndarray:
        """Row ``k`` as a ``2**n x 2**n`` array indexed ``[alpha, beta]``."""
        d = 2**self.n
        return self.entries[k].reshape(d, d)

    def gram(self) -> np.ndarray:
        return self.entries.conj().T @ self.entries


def coefficient_matrix(s: EncryptionSet) -> CoefficientMatrix:
    """Rescaled expansion coefficients ``sqrt(p_k) Tr(U_k Z^beta X^alpha) / 2**n``."""
    coeffs = _expand_batch(s.matrices)  # (M, 2**n, 2**n)
    rows = np.sqrt(s.probs)[:, None] * coeffs.reshape(s.M, -1)
    return CoefficientMatrix(s.n, rows)


def check_gram(c: CoefficientMatrix, tol: float = GRAM_TOL):
    """Return ``(ok, residual)`` for ``|C^dagger C - I / 4**n|_F <= tol``."""
    size = 4**c.n
    residual = float(np.linalg.norm(c.gram() - np.eye(size) / size))
    return residual <= tol, residual


@dataclass
class MinimalCase:
    uniform_ok: bool
    orthonormal_ok: bool
    uniform_residual: float
    orthonormal_residual: float


@dataclass
class OptimalityReport:
    n: int
    applicable: bool
    security: SecurityReport
    M_count: int
    M_bound_ok: bool
    gram_ok: bool
    gram_residual: float
    entropy_bits: float
    entropy_ok: bool
    max_prob: float
    prob_bound_ok: bool
    singular_values: Optional[list] = None
    spectrum_ok: Optional[bool] = None
    minimal_case: Optional[MinimalCase] = None
    tolerances: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """All bounds hold (and the set was secure to begin with)."""
        flags = [self.applicable, self.M_bound_ok, self.gram_ok, self.entropy_ok, self.prob_bound_ok]
        if self.spectrum_ok is not None:
            flags.append(self.spectrum_ok)
        if self.minimal_case is not None:
            flags += [self.minimal_case.uniform_ok, self.minimal_case.orthonormal_ok]
        return all(flags)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "applicable": self.applicable,
            "security": self.security.to_dict(),
            "M_count": self.M_count,
            "M_bound_ok": self.M_bound_ok,
            "gram_ok": self.gram_ok,
            "gram_residual": self.gram_residual,
            "entropy_bits": self.entropy_bits,
            "entropy_ok": self.entropy_ok,
            "max_prob": self.max_prob,
            "prob_bound_ok": self.prob_bound_ok,
            "singular_values": self.singular_values,
            "spectrum_ok": self.spectrum_ok,
            "minimal_case": None,
            "tolerances": dict(self.tolerances),
        }
        if self.minimal_case is not None:
            mc = self.minimal_case
            out["minimal_case"] = {
                "uniform_ok": mc.uniform_ok,
                "orthonormal_ok": mc.orthonormal_ok,
                "uniform_residual": mc.uniform_residual,
                "orthonormal_residual": mc.orthonormal_residual,
            }
        return out


def analyze(
    s: EncryptionSet,
    security_tol: float = SECURITY_TOL,
    gram_tol: float = GRAM_TOL,
    entropy_tol: float = ENTROPY_TOL,
    prob_tol: float = PROB_BOUND_TOL,
    spectrum_tol: float = SPECTRUM_TOL,
    svd_row_factor: int = SVD_ROW_FACTOR,
) -> OptimalityReport:
    """Evaluate the key-size bounds on ``s``.

    The bounds are only claimed for secure sets; for an insecure set the
    report is computed anyway but ``applicable`` is False and the security
    verdict is attached.
    """
    n = s.n
    size = 4**n
    security = check_security_basis(s, tol=security_tol)
    c = coefficient_matrix(s)
    gram_ok, gram_residual = check_gram(c, gram_tol)
    entropy = shannon_entropy(s.probs)
    max_prob = float(s.probs.max())

    report = OptimalityReport(
        n=n,
        applicable=security.secure,
        security=security,
        M_count=s.M,
        M_bound_ok=s.M >= size,
        gram_ok=gram_ok,
        gram_residual=gram_residual,
        entropy_bits=entropy,
        entropy_ok=entropy >= 2 * n - entropy_tol,
        max_prob=max_prob,
        prob_bound_ok=max_prob <= 1.0 / size + prob_tol,
        tolerances={
            "security": security_tol,
            "gram": gram_tol,
            "entropy": entropy_tol,
            "prob": prob_tol,
            "spectrum": spectrum_tol,
        },
    )

    if s.M <= svd_row_factor * size:
        sv = np.linalg.svd(c.entries, compute_uv=False)
        report.singular_values = sv.tolist()
        # all 4**n singular values must equal 2**-n; fewer rows means rank deficiency
        report.spectrum_ok = bool(
            sv.size == size and np.all(np.abs(sv - 2.0**-n) <= spectrum_tol)
        )

    if s.M == size:
        uniform_res = float(np.abs(s.probs - 1.0 / size).max())
        ortho_res = float(np.linalg.norm(hs_gram(s.ops) - np.eye(size)))
        report.minimal_case = MinimalCase(
            uniform_ok=uniform_res <= spectrum_tol,
            orthonormal_ok=ortho_res <= spectrum_tol,
            uniform_residual=uniform_res,
            orthonormal_residual=ortho_res,
        )
    return report


def _flat_index(n: int, *parts):
    """Concatenate ``n``-bit integers ``a || b || c || d`` into one index."""
    idx = 0
    for p in parts:
        idx = (idx << n) | p
    return idx


def build_gram_constraint_operator(n: int) -> np.ndarray:
    """Signed ``4**(2n) x 4**(2n)`` integer matrix of the Gram constraint system.

    Rows are indexed by ``(l, m, p, q)`` and columns by ``(a, b, g, d)``, each
    flattened as the concatenation of four ``n``-bit strings. The entry is

        (-1)^{b.l + a.q}  if g = a ^ p ^ l and d = b ^ q ^ m, else 0.

    Writing ``Psi[(a, b), (g, d)] = sum_k C[k, (a, b)] conj(C[k, (g, d)])``,
    security is equivalent to ``M @ vec(Psi) = e_0``.
    """
    if not 1 <= n <= MAX_OPERATOR_QUBITS:
        raise ValueError(f"operator is built for 1 <= n <= {MAX_OPERATOR_QUBITS}, got {n}")
    d = 2**n
    size = d**4
    op = np.zeros((size, size), dtype=np.int8)
    # vectorize over (a, b) for every row label (l, m, p, q)
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    a, b = a.ravel(), b.ravel()
    for l in range(d):
        for m in range(d):
            for p in range(d):
                for q in range(d):
                    row = _flat_index(n, l, m, p, q)
                    sign = 1 - 2 * ((_popcount(b & l) + _popcount(a & q)) & 1)
                    cols = (((a * d + b) * d + (a ^ p ^ l)) * d) + (b ^ q ^ m)
                    op[row, cols] = sign
    return op


def verify_operator_orthogonality(op: np.ndarray) -> bool:
    """``op @ op.T == 4**n * I`` in exact integer arithmetic."""
    size = op.shape[0]
    d2 = int(round(size**0.5))  # size = (4**n)**2
    prod = op.astype(np.int64) @ op.astype(np.int64).T
    return bool(np.array_equal(prod, d2 * np.eye(size, dtype=np.int64)))


def solve_gram_system(n: int, op: Optional[np.ndarray] = None) -> np.ndarray:
    """Solve ``op @ psi = e_0`` numerically; returns ``Psi`` as a ``4**n x 4**n`` array."""
    if op is None:
        op = build_gram_constraint_operator(n)
    rhs = np.zeros(op.shape[0])
    rhs[0] = 1.0
    psi = np.linalg.solve(op.astype(float), rhs)
    return psi.reshape(4**n, 4**n)


def psi_from_coefficients(c: CoefficientMatrix) -> np.ndarray:
    """``Psi[(a, b), (g, d)] = sum_k C[k, (a, b)] conj(C[k, (g, d)])``."""
    return c.entries.T @ c.entries.conj()
