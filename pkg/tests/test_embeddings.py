import warnings

import numpy as np
import pytest

from oracles import all_states, brute_energies, brute_spectrum, partition_sum
from qubogap.embeddings import SvmHyperparams, clustering_qubo, svm_qubo
from qubogap.kernels import KernelMatrix, center_kernel
from qubogap.qubo import ContractError, energy


def centered(k):
    return center_kernel(KernelMatrix(k))


def random_centered(rng, n):
    x = rng.normal(size=(n, 3))
    return centered(x @ x.T)


class TestClustering:
    def test_antipodal_pair(self):
        q = clustering_qubo(KernelMatrix(np.array([[1.0, -1.0], [-1.0, 1.0]]), centered=True))
        np.testing.assert_array_equal(q.q, [[-1.0, 2.0], [0.0, -1.0]])
        # brute force: states 00, 10, 01, 11
        np.testing.assert_array_equal(brute_energies(q.q), [0.0, -1.0, -1.0, 0.0])
        assert brute_spectrum(q.q)[2] == 1.0

    def test_zero_kernel(self):
        q = clustering_qubo(KernelMatrix(np.zeros((3, 3)), centered=True))
        assert not q.q.any()

    def test_energy_is_cross_partition_similarity(self, rng):
        km = random_centered(rng, 4)
        q = clustering_qubo(km)
        for z in all_states(4):
            assert energy(q, z) == pytest.approx(partition_sum(km.k, z), abs=1e-12)

    def test_complement_symmetry(self, rng):
        for n in (2, 5, 9, 12):
            q = clustering_qubo(random_centered(rng, n))
            e = brute_energies(q.q) if n <= 9 else None
            full = (1 << n) - 1
            for idx in range(0, 1 << n, max(1, (1 << n) // 512)):
                if e is not None:
                    assert e[idx] == pytest.approx(e[full ^ idx], abs=1e-9)
                else:
                    z = np.array([(idx >> i) & 1 for i in range(n)])
                    assert energy(q, z) == pytest.approx(energy(q, 1 - z), abs=1e-9)

    def test_constant_shift_removed_by_centering(self, rng):
        km = random_centered(rng, 6)
        shifted = centered(km.k + 3.7 * np.ones((6, 6)))
        np.testing.assert_allclose(clustering_qubo(shifted).q, clustering_qubo(km).q, atol=1e-9)

    def test_uncentered_warns(self):
        with pytest.warns(UserWarning):
            clustering_qubo(KernelMatrix(np.eye(3)))

    def test_too_small(self):
        with pytest.raises(ContractError), warnings.catch_warnings():
            warnings.simplefilter("ignore")
            clustering_qubo(KernelMatrix(np.eye(1)))


class TestSvm:
    def test_empty_support_is_zero(self, rng):
        a = rng.normal(size=(5, 5))
        q = svm_qubo(KernelMatrix(a @ a.T), [1, -1, 1, 1, -1], SvmHyperparams(0.3, 2.0))
        assert energy(q, np.zeros(5)) == 0.0

    def test_single_point(self):
        q = svm_qubo(KernelMatrix([[2.5]]), [1], SvmHyperparams(0.4, 1.5))
        assert q.q[0, 0] == pytest.approx(-1 + 0.4 * (2.5 / 2 + 1.5), abs=1e-15)

    def test_two_point_fixture(self):
        q = svm_qubo(KernelMatrix(np.eye(2)), [1, -1], SvmHyperparams(0.1, 1.0))
        np.testing.assert_allclose(q.q, [[-0.85, -0.2], [0.0, -0.85]], atol=1e-15)
        np.testing.assert_allclose(brute_energies(q.q), [0.0, -0.85, -0.85, -1.9], atol=1e-15)
        lo, second, gap, deg, ground = brute_spectrum(q.q)
        assert ground == 3 and deg == 1
        assert gap == pytest.approx(1.05, abs=1e-12)

    def test_matches_dual_objective(self, rng):
        n = 6
        a = rng.normal(size=(n, n))
        k = a @ a.T
        y = rng.choice([-1, 1], size=n)
        c, lam = 0.2, 3.0
        q = svm_qubo(KernelMatrix(k), y, SvmHyperparams(c, lam))
        yy = np.outer(y, y)
        for z in all_states(n):
            expected = -z.sum() + c * z @ (0.5 * yy * k + lam * yy) @ z
            assert energy(q, z) == pytest.approx(expected, abs=1e-12)

    def test_penalty_is_squared_constraint(self, rng):
        for n in (3, 7, 10):
            a = rng.normal(size=(n, n))
            km = KernelMatrix(a @ a.T)
            y = rng.choice([-1, 1], size=n)
            c, lam = 0.15, 4.0
            with_pen = brute_energies(svm_qubo(km, y, SvmHyperparams(c, lam)).q)
            without = brute_energies(svm_qubo(km, y, SvmHyperparams(c, 0.0)).q)
            for idx in range(1 << n):
                z = np.array([(idx >> i) & 1 for i in range(n)])
                violation = float(y @ z)
                diff = with_pen[idx] - without[idx]
                assert diff == pytest.approx(c * lam * violation ** 2, abs=1e-9)
                assert diff >= -1e-12
                if violation == 0:
                    assert abs(diff) < 1e-12

    def test_label_flip_invariance(self, rng):
        a = rng.normal(size=(5, 5))
        km = KernelMatrix(a @ a.T)
        y = np.array([1, 1, -1, 1, -1])
        hp = SvmHyperparams(0.1, 1.0)
        np.testing.assert_array_equal(svm_qubo(km, y, hp).q, svm_qubo(km, -y, hp).q)

    def test_validation(self):
        km = KernelMatrix(np.eye(2))
        with pytest.raises(ContractError):
            svm_qubo(km, [1, 0], SvmHyperparams(0.1, 1.0))
        with pytest.raises(ContractError):
            svm_qubo(km, [1, -1, 1], SvmHyperparams(0.1, 1.0))
        with pytest.raises(ContractError):
            SvmHyperparams(0.0, 1.0)
        with pytest.raises(ContractError):
            SvmHyperparams(0.1, -1.0)
