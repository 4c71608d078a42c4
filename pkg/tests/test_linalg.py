import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meancert.linalg import (DomainError, Powers, congruence, eigh,
                             hermitianize, hs_norm, is_psd, mat_fn, mat_pow,
                             spectral_norm, validate_hermitian)


def rand_pd(dim, seed, lo=0.1, hi=10.0, complex_entries=False):
    rng = np.random.default_rng(seed)
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), dim))
    z = rng.standard_normal((dim, dim))
    if complex_entries:
        z = z + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(z)
    return hermitianize((q * lam) @ q.conj().T)


class TestValidateHermitian:
    def test_accepts_symmetric(self):
        m = np.array([[2.0, 1.0], [1.0, 2.0]])
        out = validate_hermitian(m)
        assert np.array_equal(out, m)

    def test_symmetrizes_tiny_skew(self):
        m = np.array([[1.0, 1.0 + 1e-12], [1.0, 1.0]])
        out = validate_hermitian(m)
        assert out[0, 1] == out[1, 0]

    def test_rejects_large_skew(self):
        with pytest.raises(DomainError, match="[Hh]ermitian"):
            validate_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            validate_hermitian(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            validate_hermitian(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_real_cast_for_zero_imag(self):
        m = np.array([[2.0 + 0j, 1.0], [1.0, 2.0]])
        assert not np.iscomplexobj(validate_hermitian(m))

    def test_complex_hermitian_kept(self):
        m = np.array([[2.0, 1.0j], [-1.0j, 2.0]])
        assert np.iscomplexobj(validate_hermitian(m))


class TestEigh:
    def test_frozen_2x2(self):
        # example with closed-form spectrum {1, 3}
        dec = eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert dec.eigenvalues == pytest.approx([1.0, 3.0], abs=1e-14)
        v = dec.eigenvectors
        assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-14)

    def test_reconstruction(self):
        m = rand_pd(5, 0)
        dec = eigh(m)
        rec = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T
        assert np.allclose(rec, m, atol=1e-12 * spectral_norm(m))

    def test_ascending_order(self):
        dec = eigh(rand_pd(6, 1))
        assert np.all(np.diff(dec.eigenvalues) >= 0)


class TestMatFn:
    def test_square_matches_product(self):
        m = rand_pd(4, 2)
        assert np.allclose(mat_fn(m, lambda x: x * x), m @ m,
                           atol=1e-12 * spectral_norm(m) ** 2)

    def test_exp_spectrum(self):
        m = np.diag([0.0, 1.0])
        out = mat_fn(m, math.exp)
        assert np.allclose(out, np.diag([1.0, math.e]), atol=1e-14)

    def test_rejects_complex_values(self):
        with pytest.raises(DomainError, match="eigenvalue"):
            mat_fn(np.diag([-1.0, 1.0]), lambda x: math.sqrt(x))


class TestMatPow:
    def test_integer_power_matches_product(self):
        m = rand_pd(4, 3)
        assert np.allclose(mat_pow(m, 3), m @ m @ m,
                           rtol=1e-12, atol=1e-12 * spectral_norm(m) ** 3)

    def test_sqrt_squares_back(self):
        m = rand_pd(5, 4)
        r = mat_pow(m, 0.5)
        assert np.allclose(r @ r, m, atol=1e-11 * spectral_norm(m))

    def test_inverse(self):
        m = rand_pd(4, 5)
        assert np.allclose(mat_pow(m, -1.0) @ m, np.eye(4), atol=1e-9)

    def test_homomorphism(self):
        m = rand_pd(4, 6)
        lhs = mat_pow(m, 0.7)
        rhs = mat_pow(m, 0.3) @ mat_pow(m, 0.4)
        assert np.allclose(lhs, rhs, atol=1e-11 * spectral_norm(lhs))

    def test_zero_power_is_identity(self):
        assert np.allclose(mat_pow(rand_pd(3, 7), 0.0), np.eye(3), atol=1e-13)

    def test_clamps_roundoff_negative(self):
        # eigenvalue -1e-14 sits inside the clamp window and maps to 0
        m = np.diag([-1e-14, 1.0])
        r = mat_pow(m, 0.5)
        assert r[0, 0] == 0.0
        assert r[1, 1] == pytest.approx(1.0)

    def test_rejects_genuinely_negative_for_fractional(self):
        with pytest.raises(DomainError, match="eigenvalue"):
            mat_pow(np.diag([-1.0, 1.0]), 0.5)

    def test_rejects_singular_for_negative_power(self):
        with pytest.raises(DomainError):
            mat_pow(np.diag([0.0, 1.0]), -1.0)

    def test_integer_power_allows_indefinite(self):
        m = np.diag([-2.0, 3.0])
        assert np.allclose(mat_pow(m, 2), np.diag([4.0, 9.0]))


class TestIsPsd:
    def test_identity(self):
        res = is_psd(np.eye(3))
        assert res.ok and res.lam_min == pytest.approx(1.0)

    def test_indefinite_witness(self):
        m = np.diag([1.0, -2.0])
        res = is_psd(m)
        assert not res.ok
        assert res.lam_min == pytest.approx(-2.0)
        # witness attains the minimal eigenvalue as a Rayleigh quotient
        w = res.witness
        assert abs(w.conj() @ m @ w - res.lam_min) < 1e-12
        assert np.linalg.norm(w) == pytest.approx(1.0)

    def test_scale_is_relative(self):
        # -2e-9 against norm 1e3 is within the default relative window
        assert is_psd(np.diag([-2e-9, 1e3])).ok
        assert not is_psd(np.diag([-2e-9, 1.0])).ok

    @given(st.floats(min_value=1e-12, max_value=1e-2),
           st.floats(min_value=1.0, max_value=100.0))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_tol(self, tol, factor):
        m = np.diag([-5e-7, 1.0])
        if is_psd(m, tol).ok:
            assert is_psd(m, tol * factor).ok


class TestNorms:
    def test_hs_norm_frozen(self):
        assert hs_norm(np.diag([3.0, 4.0])) == 5.0

    def test_hs_norm_unitary_invariance(self):
        m = rand_pd(5, 8)
        q, _ = np.linalg.qr(np.random.default_rng(9).standard_normal((5, 5)))
        assert hs_norm(q @ m @ q.T) == pytest.approx(hs_norm(m), rel=1e-12)

    def test_hs_norm_not_square_ok(self):
        assert hs_norm(np.array([[1.0, 2.0, 2.0]])) == 3.0

    def test_spectral_norm(self):
        assert spectral_norm(np.diag([3.0, -7.0])) == pytest.approx(7.0)

    def test_congruence(self):
        s = np.array([[1.0, 2.0], [0.0, 1.0]])
        m = rand_pd(2, 10)
        assert np.allclose(congruence(s, m), s @ m @ s.conj().T)


class TestPowers:
    def test_pow_one_is_input(self):
        m = rand_pd(4, 11)
        p = Powers(m)
        assert p.pow(1.0) is p.matrix

    def test_pow_zero_is_exact_identity(self):
        p = Powers(rand_pd(4, 12))
        assert np.array_equal(p.pow(0.0), np.eye(4))

    def test_pow_cached(self):
        p = Powers(rand_pd(3, 13))
        assert p.pow(0.5) is p.pow(0.5)

    def test_matches_mat_pow(self):
        m = rand_pd(5, 14)
        p = Powers(m)
        assert np.allclose(p.pow(-0.5), mat_pow(m, -0.5), atol=1e-10)

    def test_dim(self):
        assert Powers(rand_pd(6, 15)).dim == 6

    def test_complex_input(self):
        m = rand_pd(4, 16, complex_entries=True)
        p = Powers(m)
        r = p.pow(0.5)
        assert np.allclose(r @ r, m, atol=1e-11 * spectral_norm(m))
