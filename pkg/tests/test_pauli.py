import numpy as np
import pytest

import dense_ref
from magnusim.pauli import (
    DROP_TOL,
    PauliSum,
    PauliTerm,
    add,
    adjoint,
    anticommutes,
    commutator,
    is_anti_hermitian,
    is_hermitian,
    multiply,
    multiply_sums,
    remap_sites,
    scale,
)


def term(n, ops):
    return PauliTerm.from_ops(n, ops)


class TestMultiply:
    def test_single_qubit_table(self):
        X = term(1, {0: "X"})
        Y = term(1, {0: "Y"})
        Z = term(1, {0: "Z"})
        assert multiply(X, Z) == (-1j, Y)
        assert multiply(Z, X) == (1j, Y)
        assert multiply(X, Y) == (1j, Z)
        assert multiply(Y, X) == (-1j, Z)
        assert multiply(Y, Z) == (1j, X)
        assert multiply(Z, Y) == (-1j, X)

    def test_xz_times_zx_on_two_sites(self):
        # two anticommuting site products: (-i)(+i) = +1, result Y0 Y1
        p = term(2, {0: "X", 1: "Z"})
        q = term(2, {0: "Z", 1: "X"})
        phase, r = multiply(p, q)
        assert phase == 1
        assert r == term(2, {0: "Y", 1: "Y"})

    def test_involution(self):
        for ops in ({0: "X"}, {0: "Y"}, {0: "Z"}, {0: "X", 2: "Y"}):
            p = term(3, ops)
            assert multiply(p, p) == (1, PauliTerm.identity(3))

    def test_identity_is_neutral(self, rng):
        for _ in range(50):
            p = dense_ref.random_pauli_term(rng, 4, PauliTerm)
            assert multiply(p, PauliTerm.identity(4)) == (1, p)
            assert multiply(PauliTerm.identity(4), p) == (1, p)

    def test_matches_dense_product(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            p = dense_ref.random_pauli_term(rng, n, PauliTerm)
            q = dense_ref.random_pauli_term(rng, n, PauliTerm)
            phase, r = multiply(p, q)
            lhs = dense_ref.term_matrix(p) @ dense_ref.term_matrix(q)
            rhs = phase * dense_ref.term_matrix(r)
            assert np.abs(lhs - rhs).max() < 1e-14

    def test_associative(self, rng):
        for _ in range(60):
            p, q, r = (dense_ref.random_pauli_term(rng, 3, PauliTerm) for _ in range(3))
            ph1, pq = multiply(p, q)
            ph2, pq_r = multiply(pq, r)
            ph3, qr = multiply(q, r)
            ph4, p_qr = multiply(p, qr)
            assert pq_r == p_qr
            assert ph1 * ph2 == ph3 * ph4

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            multiply(term(2, {0: "X"}), term(3, {0: "X"}))


class TestCommutator:
    def test_su2(self):
        a = PauliSum(1, {term(1, {0: "X"}): 1.0})
        b = PauliSum(1, {term(1, {0: "Y"}): 1.0})
        c = commutator(a, b)
        assert c.items() == [(term(1, {0: "Z"}), 2j)]

    def test_commuting_strings_vanish(self):
        a = PauliSum(2, {term(2, {0: "Z"}): 1.0})
        b = PauliSum(2, {term(2, {1: "Z"}): 1.0})
        assert len(commutator(a, b)) == 0

    def test_dense_example(self):
        # [X0 X1 + Y0 Y1, Z0] = -2i Y0 X1 + 2i X0 Y1
        a = PauliSum(2, {term(2, {0: "X", 1: "X"}): 1.0, term(2, {0: "Y", 1: "Y"}): 1.0})
        b = PauliSum(2, {term(2, {0: "Z"}): 1.0})
        c = commutator(a, b)
        assert c.coeff(term(2, {0: "Y", 1: "X"})) == -2j
        assert c.coeff(term(2, {0: "X", 1: "Y"})) == 2j
        assert len(c) == 2

    def test_antisymmetry_exact(self, rng):
        for _ in range(30):
            a = dense_ref.random_pauli_sum(rng, 3, 4, PauliSum, PauliTerm)
            b = dense_ref.random_pauli_sum(rng, 3, 4, PauliSum, PauliTerm)
            lhs = commutator(a, b)
            rhs = commutator(b, a).scale(-1.0)
            assert lhs == rhs

    def test_jacobi_identity(self, rng):
        for _ in range(20):
            a, b, c = (
                dense_ref.random_pauli_sum(rng, 3, 3, PauliSum, PauliTerm)
                for _ in range(3)
            )
            total = (
                commutator(a, commutator(b, c))
                + commutator(b, commutator(c, a))
                + commutator(c, commutator(a, b))
            )
            assert total.l1_norm() < 1e-9

    def test_matches_dense_commutator(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 7))
            a = dense_ref.random_pauli_sum(rng, n, 4, PauliSum, PauliTerm)
            b = dense_ref.random_pauli_sum(rng, n, 4, PauliSum, PauliTerm)
            ad = dense_ref.sum_matrix(a)
            bd = dense_ref.sum_matrix(b)
            got = dense_ref.sum_matrix(commutator(a, b))
            want = ad @ bd - bd @ ad
            assert np.abs(got - want).max() < 1e-12


class TestSumOps:
    def test_scale_cancellation(self):
        x = PauliSum(1, {term(1, {0: "X"}): 1.0})
        total = scale(x, 2.0) + scale(x, -2.0)
        assert len(total) == 0

    def test_adjoint_conjugates(self):
        z = PauliSum(1, {term(1, {0: "Z"}): 1j})
        assert adjoint(z).coeff(term(1, {0: "Z"})) == -1j

    def test_add_and_linearity_dense(self, rng):
        for _ in range(30):
            a = dense_ref.random_pauli_sum(rng, 4, 5, PauliSum, PauliTerm)
            b = dense_ref.random_pauli_sum(rng, 4, 5, PauliSum, PauliTerm)
            lhs = dense_ref.sum_matrix(add(a, b))
            rhs = dense_ref.sum_matrix(a) + dense_ref.sum_matrix(b)
            assert np.abs(lhs - rhs).max() < 1e-13

    def test_multiply_sums_matches_dense(self, rng):
        for _ in range(30):
            a = dense_ref.random_pauli_sum(rng, 3, 4, PauliSum, PauliTerm)
            b = dense_ref.random_pauli_sum(rng, 3, 4, PauliSum, PauliTerm)
            got = dense_ref.sum_matrix(multiply_sums(a, b))
            want = dense_ref.sum_matrix(a) @ dense_ref.sum_matrix(b)
            assert np.abs(got - want).max() < 1e-12

    def test_drop_tolerance(self):
        tiny = PauliSum(1, {term(1, {0: "X"}): DROP_TOL / 2})
        assert len(tiny) == 0

    def test_l1_bounds_spectral(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 7))
            a = dense_ref.random_pauli_sum(rng, n, 5, PauliSum, PauliTerm)
            assert a.l1_norm() >= dense_ref.spectral_norm(dense_ref.sum_matrix(a)) - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            PauliSum(1, {term(1, {0: "X"}): 1.0}) + PauliSum(2, {term(2, {0: "X"}): 1.0})


class TestSupportAndChecks:
    def test_identity_support_empty(self):
        assert PauliTerm.identity(5).support() == frozenset()

    def test_mask_readout(self):
        t = term(12, {3: "X", 5: "Z"})
        assert t.support() == frozenset({3, 5})
        assert t.weight() == 2

    def test_is_anti_hermitian(self):
        xx = term(2, {0: "X", 1: "X"})
        assert is_anti_hermitian(PauliSum(2, {xx: -0.3j}), 1e-12)
        assert not is_anti_hermitian(PauliSum(2, {xx: 0.3}), 1e-12)
        assert is_hermitian(PauliSum(2, {xx: 0.3}), 1e-12)
        assert is_anti_hermitian(PauliSum.zero(2), 0.0)

    def test_anticommutes(self):
        assert anticommutes(term(1, {0: "X"}), term(1, {0: "Z"}))
        assert not anticommutes(term(2, {0: "X"}), term(2, {1: "Z"}))

    def test_remap_sites_roundtrip(self, rng):
        a = dense_ref.random_pauli_sum(rng, 3, 4, PauliSum, PauliTerm)
        fwd = remap_sites(a, {0: 4, 1: 2, 2: 0}, 5)
        back = remap_sites(fwd, {4: 0, 2: 1, 0: 2}, 3)
        assert back == a


class TestRendering:
    def test_term_str(self):
        assert str(term(12, {3: "X", 5: "Z"})) == "X3 Z5"
        assert str(PauliTerm.identity(4)) == "I"

    def test_sum_str_golden(self):
        s = PauliSum(
            3,
            {
                term(3, {0: "Z"}): 2.0,
                term(3, {1: "X", 2: "Y"}): -0.5j,
            },
        )
        assert str(s) == "(+2+0j) Z0\n(-0-0.5j) X1 Y2"

    def test_deterministic_item_order(self):
        s = PauliSum(
            2,
            {
                term(2, {0: "X"}): 1.0,
                term(2, {0: "Z"}): 1.0,
                term(2, {1: "Z"}): 1.0,
            },
        )
        keys = [t.sort_key() for t, _ in s.items()]
        assert keys == sorted(keys)
