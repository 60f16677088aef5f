"""Generators of secure and insecure encryption sets for testing the checkers.

The secure constructions are a uniform orthonormal basis (the one-time pad
or a conjugated basis) and uniform unions of several bases. The mutations
act on sets with exactly ``4**n`` entries, where any departure from a
uniform orthonormal basis is insecure.
"""

from __future__ import annotations

import numpy as np

from .encryption import EncryptionSet, conjugated_basis, make_set, qotp, random_unitary

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def union(*sets: EncryptionSet, weights=None) -> EncryptionSet:
    """Mixture of sets: entry ``k`` of set ``i`` gets ``weights[i] * p_k``."""
    if weights is None:
        weights = [1.0 / len(sets)] * len(sets)
    entries = []
    for w, s in zip(weights, sets):
        entries += [(w * p, op) for p, op in s.entries]
    return make_set(entries)


def drop_entry(s: EncryptionSet, k: int) -> EncryptionSet:
    """Remove entry ``k`` and renormalize the rest."""
    kept = [(p, op) for i, (p, op) in enumerate(s.entries) if i != k]
    total = sum(p for p, _ in kept)
    return make_set([(p / total, op) for p, op in kept])


def skew_probabilities(s: EncryptionSet, i: int, j: int, amount: float) -> EncryptionSet:
    """Move probability ``amount`` from entry ``i`` to entry ``j``."""
    probs = s.probs.copy()
    amount = min(amount, probs[i])
    probs[i] -= amount
    probs[j] += amount
    return make_set(list(zip(probs, s.ops)))


def substitute_operator(s: EncryptionSet, k: int, op) -> EncryptionSet:
    """Replace operator ``k``, keeping every probability."""
    ops = list(s.ops)
    ops[k] = op
    return make_set(list(zip(s.probs, ops)))


def random_pauli_subset(n: int, size: int, rng) -> EncryptionSet:
    """Uniform set over ``size`` distinct, randomly chosen one-time-pad keys."""
    base = qotp(n)
    keys = rng.choice(base.M, size=size, replace=False)
    return make_set([(1.0 / size, base.ops[k]) for k in keys])


def random_unitary_set(n: int, size: int, rng) -> EncryptionSet:
    """``size`` Haar-random unitaries with Dirichlet weights."""
    probs = rng.dirichlet(np.ones(size))
    return make_set([(p, random_unitary(n, rng)) for p in probs])


def secure_sets(n: int, count: int, rng) -> list:
    """``count`` secure sets: the pad, conjugated bases and their unions."""
    out = [("qotp", qotp(n))]
    i = 0
    while len(out) < count:
        kind = i % 3
        if kind == 0:
            out.append(("conjugated", conjugated_basis(n, seed=rng)))
        elif kind == 1:
            out.append(("union2", union(conjugated_basis(n, seed=rng), qotp(n))))
        else:
            w = float(rng.uniform(0.2, 0.8))
            sets = (conjugated_basis(n, seed=rng), conjugated_basis(n, seed=rng))
            out.append(("union_weighted", union(*sets, weights=[w, 1 - w])))
        i += 1
    return out[:count]


def insecure_mutations(base: EncryptionSet, rng) -> list:
    """Mutated copies of a ``4**n``-entry secure set, all insecure."""
    m = base.M
    i, j = (int(x) for x in rng.choice(m, size=2, replace=False))
    out = [
        ("drop_entry", drop_entry(base, i)),
        ("skew", skew_probabilities(base, i, j, float(rng.uniform(0.2, 1.0)) * base.probs[i])),
        ("duplicate_operator", substitute_operator(base, i, base.ops[j])),
        ("random_operator", substitute_operator(base, i, random_unitary(base.n, rng))),
    ]
    return out


def candidate_sets(n: int, count: int, seed=None) -> list:
    """Mixed list of ``(label, set)`` candidates at ``n`` qubits.

    Roughly a third are secure constructions; the rest are mutations of
    minimal secure sets, small Pauli subsets and random unitary mixtures.
    """
    rng = np.random.default_rng(seed)
    out = list(secure_sets(n, max(1, count // 3), rng))
    i = 0
    while len(out) < count:
        kind = i % 4
        if kind in (0, 1):
            base = qotp(n) if kind == 0 else conjugated_basis(n, seed=rng)
            out.extend(insecure_mutations(base, rng))
        elif kind == 2:
            size = int(rng.integers(1, 4**n))
            out.append(("pauli_subset", random_pauli_subset(n, size, rng)))
        else:
            size = int(rng.integers(1, 2 * 4**n + 1))
            out.append(("random_unitaries", random_unitary_set(n, size, rng)))
        i += 1
    return out[:count]
