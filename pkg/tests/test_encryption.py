import numpy as np
import pytest

from qencrypt import fixtures
from qencrypt.density import (
    DensityMatrix,
    product_state,
    random_density,
    totally_mixed,
    trace_distance,
)
from qencrypt.encryption import (
    InvalidEncryptionSetError,
    basis_residuals_dense,
    basis_residuals_symbolic,
    check_security_basis,
    check_security_sampled,
    conjugated_basis,
    decrypt_with_key,
    encrypt_channel,
    encrypt_with_key,
    key_index,
    make_set,
    qotp,
    random_unitary,
)
from qencrypt.pauli import BitString, PauliString, hs_inner

from conftest import SX, SZ, all_keys, kron_pauli

H = fixtures.HADAMARD


def mixture_oracle(pairs, rho):
    """Oracle: the keyed mixture by explicit loop over (p, U)."""
    return sum(p * u @ rho @ u.conj().T for p, u in pairs)


class TestMakeSet:
    def test_valid(self):
        s = make_set([(1.0, np.eye(2))])
        assert s.M == 1 and s.n == 1
        make_set([(0.5, np.eye(2)), (0.5, SX)])

    def test_bad_sum(self):
        with pytest.raises(InvalidEncryptionSetError, match="1.2"):
            make_set([(0.6, np.eye(2)), (0.6, SX)])

    def test_negative_probability(self):
        with pytest.raises(InvalidEncryptionSetError):
            make_set([(1.5, np.eye(2)), (-0.5, SX)])

    def test_non_unitary(self):
        with pytest.raises(InvalidEncryptionSetError):
            make_set([(1.0, 2 * np.eye(2))])

    def test_mixed_dims(self):
        with pytest.raises(InvalidEncryptionSetError):
            make_set([(0.5, np.eye(2)), (0.5, np.eye(4))])
        with pytest.raises(InvalidEncryptionSetError):
            make_set([(0.5, PauliString("1", "0")), (0.5, np.eye(4))])

    def test_empty(self):
        with pytest.raises(InvalidEncryptionSetError):
            make_set([])

    def test_immutable(self):
        s = make_set([(1.0, np.eye(2))])
        with pytest.raises(ValueError):
            s.matrices[0, 0, 0] = 2
        with pytest.raises(ValueError):
            s.probs[0] = 0.5


class TestConstructors:
    def test_qotp_n1(self):
        s = qotp(1)
        assert s.M == 4 and s.is_symbolic
        assert np.all(s.probs == 0.25)
        mats = {tuple(np.round(m, 12).ravel()) for m in s.matrices}
        expected = {tuple(np.round(m, 12).ravel()) for m in (np.eye(2), SX, SZ, SX @ SZ)}
        assert mats == expected

    def test_qotp_n2(self):
        s = qotp(2)
        assert s.M == 16 and np.all(s.probs == 1 / 16)

    def test_qotp_key_index(self):
        s = qotp(2)
        for a, b in all_keys(2):
            op = s.ops[key_index(2, a, b)]
            assert op.key == (BitString(a), BitString(b))

    @pytest.mark.parametrize("n", [0, 6])
    def test_qotp_range(self, n):
        with pytest.raises(InvalidEncryptionSetError):
            qotp(n)

    def test_conjugated_identity_is_qotp(self):
        s, q = conjugated_basis(2, np.eye(4)), qotp(2)
        np.testing.assert_allclose(s.matrices, q.matrices, atol=1e-15)
        np.testing.assert_array_equal(s.probs, q.probs)

    def test_conjugated_hadamard(self):
        s = conjugated_basis(1, H)
        # H conjugation swaps X and Z and maps XZ to ZX = -XZ
        expected = [np.eye(2), SX, SZ, -SX @ SZ]
        np.testing.assert_allclose(s.matrices, expected, atol=1e-15)
        assert check_security_basis(s).secure

    def test_conjugated_orthogonal(self):
        s = conjugated_basis(2, seed=3)
        mats = s.matrices
        for j in range(s.M):
            for k in range(s.M):
                assert np.isclose(hs_inner(mats[j], mats[k]), 4 if j == k else 0, atol=1e-12)

    def test_conjugated_rejects_non_unitary(self):
        with pytest.raises(InvalidEncryptionSetError):
            conjugated_basis(1, np.array([[1, 1], [0, 1]]))


class TestChannel:
    def test_qotp_on_zero_state(self):
        out = encrypt_channel(qotp(1), np.diag([1.0, 0]))
        np.testing.assert_allclose(out.mat, np.eye(2) / 2, atol=1e-15)

    def test_mixed_state_is_fixed(self, rng):
        for n in (1, 2):
            s = fixtures.random_unitary_set(n, 5, rng)
            out = encrypt_channel(s, totally_mixed(n))
            np.testing.assert_allclose(out.mat, np.eye(2**n) / 2**n, atol=1e-14)

    def test_deterministic_key(self):
        out = encrypt_channel(make_set([(1.0, SX)]), np.diag([1.0, 0]))
        np.testing.assert_allclose(out.mat, np.diag([0, 1.0]))

    def test_matches_loop_oracle(self, rng):
        s = fixtures.random_unitary_set(2, 7, rng)
        rho = random_density(2, 8)
        expected = mixture_oracle(zip(s.probs, s.matrices), rho.mat)
        np.testing.assert_allclose(encrypt_channel(s, rho).mat, expected, atol=1e-14)
        DensityMatrix(encrypt_channel(s, rho).mat)  # output validates

    def test_key_round_trip(self):
        s = qotp(2)
        rho = random_density(2, 1)
        for k in range(s.M):
            back = decrypt_with_key(s, k, encrypt_with_key(s, k, rho))
            assert np.linalg.norm(back.mat - rho.mat) <= 1e-12

    def test_single_key_flip(self):
        s = qotp(1)
        k = key_index(1, "1", "0")
        out = encrypt_with_key(s, k, np.diag([1.0, 0]))
        np.testing.assert_array_equal(out.mat, np.diag([0, 1.0]))

    def test_average_of_keys_is_channel(self):
        s = conjugated_basis(1, seed=2)
        rho = random_density(1, 3)
        avg = sum(p * encrypt_with_key(s, k, rho).mat for k, p in enumerate(s.probs))
        np.testing.assert_allclose(avg, encrypt_channel(s, rho).mat, atol=1e-15)

    def test_key_out_of_range(self):
        with pytest.raises(IndexError):
            encrypt_with_key(qotp(1), 4, totally_mixed(1))

    def test_mismatched_n(self):
        with pytest.raises(InvalidEncryptionSetError):
            encrypt_channel(qotp(1), totally_mixed(2))

    def test_linearity(self, rng):
        s = fixtures.random_unitary_set(2, 4, rng)
        a, b = random_density(2, 1), random_density(2, 2)
        lam = 0.3
        lhs = encrypt_channel(s, lam * a.mat + (1 - lam) * b.mat).mat
        rhs = lam * encrypt_channel(s, a).mat + (1 - lam) * encrypt_channel(s, b).mat
        assert np.linalg.norm(lhs - rhs) <= 1e-12

    def test_secure_output_independent_of_input(self):
        for s in (qotp(2), conjugated_basis(2, seed=4)):
            outs = [encrypt_channel(s, random_density(2, i, rank=1 + i % 4)) for i in range(10)]
            worst = max(trace_distance(a, b) for a in outs for b in outs)
            assert worst <= 1e-9


class TestBasisCheck:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_qotp_secure(self, n):
        rep = check_security_basis(qotp(n))
        assert rep.secure and rep.max_residual < 1e-12 and rep.witness is None
        rep = check_security_basis(qotp(n), method="dense")
        assert rep.secure and rep.max_residual < 1e-12

    def test_identity_insecure(self):
        rep = check_security_basis(make_set([(1.0, np.eye(2))]))
        assert not rep.secure
        assert np.isclose(rep.max_residual, np.sqrt(2))
        assert rep.witness in {
            (BitString((1,)), BitString((0,))),
            (BitString((0,)), BitString((1,))),
        }
        # lexicographically first of the three maximal residuals
        assert rep.witness == (BitString((0,)), BitString((1,)))

    def test_replaced_entry_insecure(self):
        q = qotp(1)
        k = key_index(1, "1", "1")
        s = fixtures.substitute_operator(q, k, PauliString("0", "0"))
        rep = check_security_basis(s)
        assert not rep.secure
        # oracle: dense residuals of each basis image
        worst = 0.0
        for a, b in all_keys(1):
            p = kron_pauli(a, b)
            img = mixture_oracle(zip(s.probs, s.matrices), p)
            target = np.eye(2) if a == b == (0,) else 0
            worst = max(worst, np.linalg.norm(img - target))
        assert np.isclose(rep.max_residual, worst)
        assert worst > 0.5

    def test_symbolic_matches_dense(self, rng):
        for n in (1, 2, 3):
            for size in (1, 3, 4**n):
                s = fixtures.random_pauli_subset(n, size, rng)
                skewed = fixtures.skew_probabilities(s, 0, size - 1, 0.5 * s.probs[0]) if size > 1 else s
                for t in (s, skewed):
                    np.testing.assert_allclose(
                        basis_residuals_symbolic(t), basis_residuals_dense(t), atol=1e-12
                    )

    def test_symbolic_with_phases(self):
        ops = [PauliString(a, b, (3 * i) % 4) for i, (a, b) in enumerate(all_keys(2))]
        s = make_set([(1 / 16, op) for op in ops])
        assert check_security_basis(s).secure
        np.testing.assert_allclose(basis_residuals_symbolic(s), basis_residuals_dense(s), atol=1e-12)

    def test_symbolic_requires_paulis(self):
        with pytest.raises(ValueError):
            check_security_basis(conjugated_basis(1, seed=0), method="symbolic")

    @pytest.mark.parametrize("seed", range(20))
    def test_conjugated_bases_secure(self, seed):
        n = 1 + seed % 2
        rep = check_security_basis(conjugated_basis(n, seed=seed))
        assert rep.secure and rep.max_residual <= 1e-9


class TestSampledCheck:
    def test_qotp_secure(self):
        rep = check_security_sampled(qotp(2), num_states=50, seed=0)
        assert rep.secure and rep.checked == 50 + 16

    def test_bit_flip_pad_is_insecure(self):
        s = make_set([(0.5, np.eye(2)), (0.5, SX)])
        rep = check_security_sampled(s, num_states=0, seed=0)
        assert not rep.secure
        # X conjugation negates Z, so the Z-axis states are hidden ...
        out = encrypt_channel(s, product_state("z"))
        np.testing.assert_allclose(out.mat, np.eye(2) / 2, atol=1e-15)
        # ... but (I + X)/2 is a fixed point, at trace distance 1/2 from I/2
        out = encrypt_channel(s, product_state("x"))
        np.testing.assert_allclose(out.mat, product_state("x").mat, atol=1e-15)
        assert rep.witness_state == "x"
        assert np.isclose(rep.max_residual, 0.5)

    def test_deterministic(self):
        s = fixtures.random_unitary_set(1, 3, np.random.default_rng(0))
        a = check_security_sampled(s, 10, seed=5)
        b = check_security_sampled(s, 10, seed=5)
        assert a == b

    def test_agrees_with_basis_check(self):
        candidates = fixtures.candidate_sets(1, 40, seed=1) + fixtures.candidate_sets(2, 40, seed=2)
        verdicts = set()
        for label, s in candidates:
            v1 = check_security_basis(s).secure
            v2 = check_security_sampled(s, num_states=10, seed=3).secure
            assert v1 == v2, label
            verdicts.add(v1)
        assert verdicts == {True, False}


class TestFixtures:
    def test_mutations_are_insecure(self, rng):
        for n in (1, 2):
            for base in (qotp(n), conjugated_basis(n, seed=rng)):
                for label, s in fixtures.insecure_mutations(base, rng):
                    assert not check_security_basis(s).secure, label

    def test_secure_sets_are_secure(self, rng):
        for n in (1, 2):
            for label, s in fixtures.secure_sets(n, 6, rng):
                assert check_security_basis(s).secure, label

    def test_union_of_secure_sets_is_secure(self):
        s = fixtures.union(qotp(1), conjugated_basis(1, H))
        assert s.M == 8 and np.all(s.probs == 1 / 8)
        assert check_security_basis(s).secure

    def test_random_unitary_is_unitary(self):
        u = random_unitary(2, 0)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
