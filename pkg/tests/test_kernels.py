import numpy as np
import pytest

from qubogap.datagen import ConesParams, DataSet, gen_cones
from qubogap.kernels import KernelMatrix, center_kernel, gram_circles, gram_linear, kernel_circles
from qubogap.qubo import ContractError


def dataset(points):
    pts = np.asarray(points, dtype=float)
    return DataSet(pts, np.where(np.arange(len(pts)) % 2, 1, -1))


def feature_map(x, a):
    return np.array([x[0], x[1], a * (x @ x)])


class TestLinear:
    def test_orthonormal(self):
        km = gram_linear(dataset([[1, 0], [0, 1]]))
        np.testing.assert_array_equal(km.k, np.eye(2))
        assert not km.centered

    def test_antipodal(self):
        km = gram_linear(dataset([[1, 0], [-1, 0]]))
        np.testing.assert_array_equal(km.k, [[1, -1], [-1, 1]])

    def test_matches_matmul(self, rng):
        x = rng.normal(size=(5, 2))
        np.testing.assert_allclose(gram_linear(dataset(x)).k, x @ x.T, atol=1e-15)

    def test_centered_data_has_zero_row_sums(self):
        d = gen_cones(ConesParams(n=12, rho=0.5, w=0.2, d=0.5, seed=1))
        np.testing.assert_allclose(gram_linear(d).k.sum(axis=1), 0.0, atol=1e-9)


class TestCircles:
    def test_origin(self):
        assert kernel_circles([0, 0], [0, 0], 3.0) == 0.0

    def test_hand_value(self):
        assert kernel_circles([1, 0], [0, 1], 1.0) == 1.0

    def test_feature_map_oracle(self, rng):
        for _ in range(100):
            x, y = rng.normal(size=2), rng.normal(size=2)
            a = rng.uniform(0.1, 3.0)
            assert kernel_circles(x, y, a) == pytest.approx(feature_map(x, a) @ feature_map(y, a), abs=1e-12)

    def test_gram_pairwise(self):
        pts = np.array([[0.3, -0.2], [1.1, 0.4]])
        km = gram_circles(dataset(pts), 2.0)
        for i in range(2):
            for j in range(2):
                assert km.k[i, j] == pytest.approx(kernel_circles(pts[i], pts[j], 2.0), abs=1e-15)

    def test_gram_diagonal(self, rng):
        pts = rng.normal(size=(6, 2))
        sq = (pts ** 2).sum(axis=1)
        np.testing.assert_allclose(np.diag(gram_circles(dataset(pts), 1.5).k), sq + 2.25 * sq ** 2)

    def test_gram_psd(self, rng):
        km = gram_circles(dataset(rng.normal(size=(10, 2))), 1.0)
        assert np.linalg.eigvalsh(km.k).min() >= -1e-9


class TestCentering:
    def test_constant_kernel_vanishes(self):
        km = center_kernel(KernelMatrix(np.ones((4, 4))))
        np.testing.assert_allclose(km.k, 0.0, atol=1e-15)
        assert km.centered

    def test_centered_data_unchanged(self):
        d = gen_cones(ConesParams(n=10, rho=0.5, w=0.2, d=0.5, seed=8))
        km = gram_linear(d)
        np.testing.assert_allclose(center_kernel(km).k, km.k, atol=1e-9)

    def test_row_sums_zero(self, rng):
        a = rng.normal(size=(4, 4))
        km = center_kernel(KernelMatrix(a + a.T))
        np.testing.assert_allclose(km.k.sum(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(km.k.sum(axis=1), 0.0, atol=1e-9)

    def test_matches_projection(self, rng):
        a = rng.normal(size=(5, 5))
        k = a @ a.T
        h = np.eye(5) - np.ones((5, 5)) / 5
        np.testing.assert_allclose(center_kernel(KernelMatrix(k)).k, h @ k @ h, atol=1e-12)

    def test_idempotent(self, rng):
        km = center_kernel(gram_circles(dataset(rng.normal(size=(7, 2))), 1.0))
        np.testing.assert_allclose(center_kernel(km).k, km.k, atol=1e-9)
        assert np.linalg.eigvalsh(km.k).min() >= -1e-9


def test_kernel_matrix_validation():
    with pytest.raises(ContractError):
        KernelMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        KernelMatrix(np.ones((2, 3)))
