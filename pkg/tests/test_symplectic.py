import numpy as np
import pytest

from ginfo import (
    CovarianceMatrix,
    NumericDomainError,
    Ordering,
    SingularMatrixError,
    SymplecticForm,
    build_symplectic_form,
    congruence_apply,
    congruence_form,
    generalized_eigenvalues,
    matrix_sqrt_spd,
    ordering_permutation,
    permute_ordering,
    reorder,
    rsup_check,
    symplectic_spectrum,
)
from ginfo import bipartite
from ginfo.symplectic import (
    J2,
    random_invertible,
    random_spd,
    random_symplectic,
)


class TestBuildForm:
    def test_single_mode_interleaved(self):
        form = build_symplectic_form(1, Ordering.MODE_INTERLEAVED)
        np.testing.assert_array_equal(form.matrix, [[0, 1], [-1, 0]])

    def test_two_mode_block_xp(self):
        form = build_symplectic_form(2, Ordering.BLOCK_XP)
        expected = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
        np.testing.assert_array_equal(form.matrix, expected)

    def test_two_mode_interleaved_is_block_diag(self):
        form = build_symplectic_form(2, Ordering.MODE_INTERLEAVED)
        expected = np.zeros((4, 4))
        expected[:2, :2] = J2
        expected[2:, 2:] = J2
        np.testing.assert_array_equal(form.matrix, expected)

    def test_zero_modes_rejected(self):
        with pytest.raises(ValueError):
            build_symplectic_form(0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("ordering", list(Ordering))
    def test_antisymmetry_exact(self, n, ordering):
        m = build_symplectic_form(n, ordering).matrix
        assert np.abs(m + m.T).max() == 0.0


class TestReorder:
    def test_identity_invariant(self):
        cvm = CovarianceMatrix(np.eye(4), ordering=Ordering.MODE_INTERLEAVED)
        out = reorder(cvm, Ordering.BLOCK_XP)
        np.testing.assert_array_equal(out.matrix, np.eye(4))

    def test_diagonal_permutation(self):
        cvm = CovarianceMatrix(np.diag([1.0, 2, 3, 4]), ordering=Ordering.MODE_INTERLEAVED)
        out = reorder(cvm, Ordering.BLOCK_XP)
        np.testing.assert_array_equal(np.diag(out.matrix), [1, 3, 2, 4])

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 3):
            m = rng.normal(size=(2 * n, 2 * n))
            there = permute_ordering(m, Ordering.MODE_INTERLEAVED, Ordering.BLOCK_XP)
            back = permute_ordering(there, Ordering.BLOCK_XP, Ordering.MODE_INTERLEAVED)
            np.testing.assert_array_equal(back, m)

    def test_permutation_inverse_is_transpose(self):
        p = ordering_permutation(3, Ordering.MODE_INTERLEAVED, Ordering.BLOCK_XP)
        np.testing.assert_allclose(p @ p.T, np.eye(6), atol=0)

    def test_custom_basis_cannot_reorder(self):
        cvm = CovarianceMatrix(np.eye(8), ordering=None)
        with pytest.raises(ValueError, match="ordering"):
            reorder(cvm, Ordering.BLOCK_XP)


class TestSpectrum:
    def test_vacuum_saturates(self):
        form = build_symplectic_form(2)
        spec = symplectic_spectrum(0.5 * np.eye(4), form)
        np.testing.assert_allclose(spec, [1.0, 1.0], atol=1e-12)

    def test_block_xp_squeezed_pair(self):
        # brute force: eigenvalues of 2i Omega^-1 Sigma for diag(2,2,1/2,1/2)
        form = build_symplectic_form(2, Ordering.BLOCK_XP)
        sigma = CovarianceMatrix(np.diag([2.0, 2.0, 0.5, 0.5]), ordering=Ordering.BLOCK_XP)
        spec = symplectic_spectrum(sigma, form)
        np.testing.assert_allclose(spec, [2.0, 2.0], atol=1e-12)

    def test_pair_family_all_equal(self):
        cfg = bipartite.PairConfig(0.125, 0.125)
        spec = symplectic_spectrum(bipartite.pair_cvm(cfg), bipartite.party_form())
        np.testing.assert_allclose(spec, 1.4069616518051216, atol=1e-9)

    def test_rejects_indefinite(self):
        form = build_symplectic_form(1)
        with pytest.raises(NumericDomainError):
            symplectic_spectrum(np.diag([1.0, -1.0]), form)

    def test_rejects_singular_form(self):
        bad = np.zeros((2, 2))
        bad[0, 1], bad[1, 0] = 1e-20, -1e-20
        with pytest.raises(SingularMatrixError):
            SymplecticForm(bad)

    def test_rejects_mixed_orderings(self):
        sigma = CovarianceMatrix(np.eye(4), ordering=Ordering.BLOCK_XP)
        form = build_symplectic_form(2, Ordering.MODE_INTERLEAVED)
        with pytest.raises(ValueError, match="ordering mismatch"):
            symplectic_spectrum(sigma, form)

    def test_williamson_invariance(self):
        rng = np.random.default_rng(11)
        form = build_symplectic_form(2)
        worst = 0.0
        for _ in range(200):
            sigma = random_spd(4, rng)
            s = random_symplectic(2, rng)
            np.testing.assert_allclose(s @ form.matrix @ s.T, form.matrix, atol=1e-9)
            before = symplectic_spectrum(sigma, form)
            after = symplectic_spectrum(congruence_apply(s, sigma), form)
            worst = max(worst, np.abs(before - after).max())
        assert worst < 1e-8


class TestRsup:
    def test_vacuum(self):
        res = rsup_check(0.5 * np.eye(4), build_symplectic_form(2))
        assert res.valid and abs(res.min_invariant - 1.0) < 1e-12

    def test_squeezed_below_threshold(self):
        res = rsup_check(0.4 * np.eye(4), build_symplectic_form(2))
        assert not res.valid
        np.testing.assert_allclose(res.min_invariant, 0.8, atol=1e-12)

    def test_pair_family(self):
        cfg = bipartite.PairConfig(0.125, 0.125)
        res = rsup_check(bipartite.pair_cvm(cfg), bipartite.party_form())
        assert res.valid
        np.testing.assert_allclose(res.min_invariant, 1.4069616518051216, atol=1e-9)


class TestCongruence:
    def test_identity(self):
        sigma = CovarianceMatrix(random_spd(4, np.random.default_rng(0)))
        out = congruence_apply(np.eye(4), sigma)
        np.testing.assert_array_equal(out.matrix, sigma.matrix)

    def test_form_transform_keeps_antisymmetry(self):
        rng = np.random.default_rng(1)
        s = random_invertible(4, rng)
        out = congruence_form(s, build_symplectic_form(2))
        assert np.abs(out.matrix + out.matrix.T).max() == 0.0

    def test_singular_transform_rejected(self):
        with pytest.raises(SingularMatrixError):
            congruence_apply(np.zeros((4, 4)), CovarianceMatrix(np.eye(4)))

    def test_shift_matches_direct_product(self):
        cfg = bipartite.PairConfig(0.2, 0.1, theta=0.5, eta=0.5)
        s = bipartite.bopp_shift(cfg).matrix
        sigma = bipartite.pair_cvm(cfg)
        out = congruence_apply(s, sigma)
        np.testing.assert_allclose(out.matrix, s @ sigma.matrix @ s.T, atol=1e-14)


class TestSqrt:
    def test_identity(self):
        np.testing.assert_array_equal(matrix_sqrt_spd(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_allclose(matrix_sqrt_spd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]),
                                   atol=1e-14)

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(200):
            m = random_spd(int(rng.choice([2, 4, 8])), rng)
            root = matrix_sqrt_spd(m)
            assert np.abs(root - root.T).max() == 0.0
            worst = max(worst, np.abs(root @ root - m).max())
        assert worst < 1e-10

    def test_indefinite_rejected(self):
        with pytest.raises(NumericDomainError):
            matrix_sqrt_spd(np.diag([1.0, -2.0]))


class TestGeneralizedEigenvalues:
    def test_same_state(self):
        m = random_spd(4, np.random.default_rng(2))
        np.testing.assert_allclose(generalized_eigenvalues(m, m), np.ones(4), atol=1e-12)

    def test_scalar_scaling(self):
        m = random_spd(4, np.random.default_rng(3))
        np.testing.assert_allclose(generalized_eigenvalues(m, 2 * m), 2 * np.ones(4),
                                   atol=1e-12)

    def test_congruence_invariance(self):
        rng = np.random.default_rng(4)
        worst = 0.0
        for _ in range(200):
            dim = int(rng.choice([4, 8]))
            s1, s2 = random_spd(dim, rng), random_spd(dim, rng)
            t = random_invertible(dim, rng)
            worst = max(worst, np.abs(
                generalized_eigenvalues(t @ s1 @ t.T, t @ s2 @ t.T)
                - generalized_eigenvalues(s1, s2)).max())
        assert worst < 1e-10
