import numpy as np
from django.test import SimpleTestCase, override_settings
from scipy.linalg import expm as scipy_expm

from apps.qmatrix.eigen import METHOD_JACOBI, METHOD_LAPACK, eigh, eigvalsh_batch
from apps.qmatrix.exceptions import DimensionError, NonFiniteError, NotHermitianError
from apps.qmatrix.expm import MINUS_I, PLUS_I, expm_general, expm_hermitian_generator, scaling_exponent
from apps.qmatrix.linalg import dagger, identity, kron, kron_all, max_norm

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
I2 = identity(2)


def random_hermitian(rng, n):
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    return 0.5 * (a + dagger(a))


class KronTests(SimpleTestCase):
    def test_identity_kron_identity(self):
        np.testing.assert_array_equal(kron(I2, I2), identity(4))

    def test_sigma_z_with_identity(self):
        np.testing.assert_array_equal(kron(SIGMA_Z, I2), np.diag([1, 1, -1, -1]))

    def test_sigma_x_pair_is_antidiagonal(self):
        expected = np.fliplr(np.eye(4))
        np.testing.assert_array_equal(kron(SIGMA_X, SIGMA_X), expected)

    def test_index_formula(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        result = kron(a, b)
        self.assertEqual(result.shape, (6, 6))
        for i in range(2):
            for j in range(3):
                for k in range(3):
                    for l in range(2):
                        self.assertEqual(result[i * 3 + k, j * 2 + l], a[i, j] * b[k, l])

    def test_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        np.testing.assert_array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))
        np.testing.assert_array_equal(kron_all([a, b, c]), kron(a, kron(b, c)))

    @override_settings(QMATRIX_KRON_MAX_ENTRIES=64)
    def test_entry_cap(self):
        with self.assertRaises(DimensionError):
            kron(identity(4), identity(4))


class EighTests(SimpleTestCase):
    def test_diagonal_input(self):
        result = eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(result.eigenvalues, [1.0, 2.0, 3.0], atol=1e-12)
        permutation = np.abs(result.eigenvectors)
        np.testing.assert_array_equal(permutation, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])

    def test_real_diagonal_is_exact(self):
        values = np.array([5.5, -2.25, 0.0, 1e6, -3.0])
        result = eigh(np.diag(values))
        np.testing.assert_allclose(result.eigenvalues, np.sort(values), atol=1e-12, rtol=0)

    def test_sigma_x_spectrum(self):
        result = eigh(SIGMA_X)
        np.testing.assert_allclose(result.eigenvalues, [-1.0, 1.0], atol=1e-12)
        lower = result.eigenvectors[:, 0]
        upper = result.eigenvectors[:, 1]
        self.assertAlmostEqual(abs(np.vdot(lower, [1, -1]) / np.sqrt(2)), 1.0, places=12)
        self.assertAlmostEqual(abs(np.vdot(upper, [1, 1]) / np.sqrt(2)), 1.0, places=12)

    def test_tridiagonal_hopping_block(self):
        block = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
        result = eigh(block)
        np.testing.assert_allclose(result.eigenvalues, [-np.sqrt(2), 0.0, np.sqrt(2)], atol=1e-12)

    def test_random_hermitian_contract(self):
        rng = np.random.default_rng(11)
        for n in (2, 5, 8, 16, 64):
            m = random_hermitian(rng, n)
            result = eigh(m, method=METHOD_JACOBI)
            v = result.eigenvectors
            self.assertTrue(np.all(np.diff(result.eigenvalues) >= 0))
            np.testing.assert_allclose(dagger(v) @ v, identity(n), atol=1e-10)
            scale = max(1.0, max_norm(m))
            self.assertLess(max_norm(result.reconstruct() - m), 1e-10 * scale)
            residual = m @ v - v * result.eigenvalues
            self.assertLess(np.max(np.linalg.norm(residual, axis=0)), 1e-10 * np.linalg.norm(m, 2))

    def test_jacobi_matches_lapack(self):
        rng = np.random.default_rng(5)
        m = random_hermitian(rng, 12)
        np.testing.assert_allclose(
            eigh(m, method=METHOD_JACOBI).eigenvalues,
            eigh(m, method=METHOD_LAPACK).eigenvalues,
            atol=1e-12,
        )

    def test_large_matrix_uses_lapack(self):
        rng = np.random.default_rng(2)
        m = random_hermitian(rng, 1024)
        result = eigh(m)
        self.assertLess(max_norm(result.reconstruct() - m), 1e-10 * max(1.0, max_norm(m)))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(NotHermitianError) as ctx:
            eigh(np.array([[0.0, 1.0], [0.5, 0.0]]))
        self.assertAlmostEqual(ctx.exception.asymmetry, 0.5)

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            eigh(SIGMA_X, method='qr')

    def test_batched_eigenvalues(self):
        stack = np.stack([SIGMA_X, SIGMA_Z, identity(2)])
        np.testing.assert_allclose(eigvalsh_batch(stack), [[-1, 1], [-1, 1], [1, 1]], atol=1e-12)


class ExpmHermitianTests(SimpleTestCase):
    def test_zero_generator(self):
        np.testing.assert_allclose(expm_hermitian_generator(np.zeros((4, 4)), 3.7), identity(4), atol=1e-15)

    def test_sigma_z_quarter_turn(self):
        u = expm_hermitian_generator(SIGMA_Z, np.pi / 2, MINUS_I)
        np.testing.assert_allclose(u, np.diag([-1j, 1j]), atol=1e-12)

    def test_unitarity(self):
        rng = np.random.default_rng(9)
        for n in (2, 8, 32):
            h = random_hermitian(rng, n)
            for t in (0.1, 3.0, 250.0):
                u = expm_hermitian_generator(h, t, MINUS_I)
                self.assertLess(max_norm(dagger(u) @ u - identity(n)), 1e-10)

    def test_sign_inverts(self):
        rng = np.random.default_rng(4)
        h = random_hermitian(rng, 6)
        forward = expm_hermitian_generator(h, 1.3, MINUS_I)
        backward = expm_hermitian_generator(h, 1.3, PLUS_I)
        np.testing.assert_allclose(forward @ backward, identity(6), atol=1e-10)

    def test_rejects_bad_sign(self):
        with self.assertRaises(ValueError):
            expm_hermitian_generator(SIGMA_Z, 1.0, sign=1.0)


class ExpmGeneralTests(SimpleTestCase):
    def test_zero(self):
        np.testing.assert_array_equal(expm_general(np.zeros((3, 3))), identity(3))

    def test_diagonal(self):
        result = expm_general(np.diag([0.5, -2.0]))
        np.testing.assert_allclose(result, np.diag(np.exp([0.5, -2.0])), rtol=1e-13)

    def test_inverse_pair(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            m *= 5.0 / np.linalg.norm(m, 2)
            np.testing.assert_allclose(expm_general(m) @ expm_general(-m), identity(6), atol=1e-8)

    def test_matches_spectral_path(self):
        rng = np.random.default_rng(21)
        for n in (2, 8, 16):
            h = random_hermitian(rng, n)
            for t in (0.01, 1.0, 40.0):
                np.testing.assert_allclose(
                    expm_general(-1j * h * t),
                    expm_hermitian_generator(h, t, MINUS_I),
                    atol=1e-9,
                )

    def test_normal_matrix_relative_error(self):
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
        spectrum = rng.uniform(-5, 1, 8) + 1j * rng.uniform(-50, 50, 8)
        m = (q * spectrum) @ dagger(q)
        expected = (q * np.exp(spectrum)) @ dagger(q)
        error = np.linalg.norm(expm_general(m) - expected) / np.linalg.norm(expected)
        self.assertLess(error, 1e-9)

    def test_stiff_generator_against_scipy(self):
        rng = np.random.default_rng(1)
        h = random_hermitian(rng, 8) * 1e6
        decay = -np.diag(rng.uniform(0, 1e3, 8))
        m = (-1j * h + decay) * 1e-2
        self.assertGreater(scaling_exponent(np.max(np.sum(np.abs(m), axis=0))), 10)
        expected = scipy_expm(m)
        np.testing.assert_allclose(expm_general(m), expected, atol=1e-8 * max(1.0, max_norm(expected)))

    def test_rejects_non_finite(self):
        with self.assertRaises(NonFiniteError):
            expm_general(np.array([[np.nan, 0.0], [0.0, 1.0]]))
