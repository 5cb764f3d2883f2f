import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import all_states, brute_energies, brute_spectrum, random_upper
from qubogap.qubo import (
    ContractError, IsingInstance, QuboInstance, SpectrumSummary, energy, flip_delta,
    format_qubo, from_symmetric, ising_energy, normalize_inf, parse_qubo, read_qubo,
    state_bits, state_index, to_ising, write_qubo,
)

Q2 = QuboInstance(np.array([[1.0, 2.0], [0.0, 3.0]]))


def upper_matrices(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.floats(-10, 10, allow_nan=False))
    ).map(np.triu)


class TestQuboInstance:
    def test_rejects_lower_entries(self):
        with pytest.raises(ContractError):
            QuboInstance(np.array([[1.0, 0.0], [1.0, 1.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(ContractError):
            QuboInstance(np.array([[np.inf]]))

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            QuboInstance(np.zeros((0, 0)))

    def test_immutable(self):
        with pytest.raises(ValueError):
            Q2.q[0, 0] = 5.0

    def test_from_any_folds_lower_triangle(self):
        q = QuboInstance.from_any([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(q.q, [[1.0, 5.0], [0.0, 4.0]])


class TestEnergy:
    def test_zero_matrix(self):
        assert energy(QuboInstance(np.zeros((3, 3))), [1, 0, 1]) == 0.0

    def test_all_ones_sums_everything(self):
        assert energy(Q2, [1, 1]) == 6.0

    def test_single_bit(self):
        assert energy(Q2, [0, 1]) == 3.0

    @pytest.mark.parametrize("z", [[1, 0, 0], [1], [2, 0]])
    def test_bad_vectors(self, z):
        with pytest.raises(ContractError):
            energy(Q2, z)


class TestFlipDelta:
    def test_isolated_bit(self):
        assert flip_delta(Q2, [0, 0], 0) == 1.0

    def test_with_coupling(self):
        assert flip_delta(Q2, [0, 1], 0) == 3.0

    def test_index_out_of_range(self):
        with pytest.raises(ContractError):
            flip_delta(Q2, [0, 0], 2)

    def test_matches_direct_difference(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 11))
            q = QuboInstance(random_upper(rng, n))
            z = rng.integers(0, 2, size=n)
            i = int(rng.integers(0, n))
            flipped = z.copy()
            flipped[i] ^= 1
            assert flip_delta(q, z, i) == pytest.approx(energy(q, flipped) - energy(q, z), abs=1e-9)


class TestIsing:
    def test_single_variable(self):
        model = to_ising(QuboInstance([[3.0]]))
        assert model.h[0] == 1.5
        assert model.c == 1.5
        assert model.j.shape == (1, 1) and model.j[0, 0] == 0.0

    def test_zero(self):
        model = to_ising(QuboInstance(np.zeros((3, 3))))
        assert not model.j.any() and not model.h.any() and model.c == 0.0

    def test_roundtrip_random(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 9))
            q = QuboInstance(random_upper(rng, n))
            model = to_ising(q)
            for z in all_states(n):
                assert ising_energy(model, 2 * z - 1) == pytest.approx(energy(q, z), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(upper_matrices(max_n=10))
    def test_roundtrip_property(self, m):
        q = QuboInstance(m)
        model = to_ising(q)
        e = brute_energies(m) if q.n <= 8 else None
        for idx in range(1 << q.n):
            z = np.array(state_bits(idx, q.n))
            expected = e[idx] if e is not None else energy(q, z)
            assert ising_energy(model, 2 * z - 1) == pytest.approx(expected, abs=1e-9)

    def test_rejects_lower_couplings(self):
        with pytest.raises(ContractError):
            IsingInstance(j=np.array([[0.0, 0.0], [1.0, 0.0]]), h=[0.0, 0.0])


class TestFromSymmetric:
    def test_doubles_off_diagonal(self):
        q = from_symmetric(np.array([[0.0, -1.0], [-1.0, 0.0]]), [0.0, 0.0])
        np.testing.assert_array_equal(q.q, [[0.0, -2.0], [0.0, 0.0]])

    def test_identity_plus_linear(self):
        q = from_symmetric(np.eye(2), [1.0, 1.0])
        np.testing.assert_array_equal(q.q, np.diag([2.0, 2.0]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ContractError):
            from_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_constant_cannot_be_kept(self):
        with pytest.raises(ContractError):
            from_symmetric(np.eye(2), constant_discarded=False)

    def test_energy_identity_random(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 9))
            a = rng.normal(size=(n, n))
            m = (a + a.T) / 2
            lin = rng.normal(size=n)
            q = from_symmetric(m, lin)
            for z in all_states(n):
                expected = z @ m @ z + lin @ z
                assert energy(q, z) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestNormalize:
    def test_divides_by_max_abs(self):
        q = normalize_inf(QuboInstance(np.array([[-1.0, 2.0], [0.0, -1.0]])))
        np.testing.assert_array_equal(q.q, [[-0.5, 1.0], [0.0, -0.5]])

    def test_idempotent(self, rng):
        q = normalize_inf(QuboInstance(random_upper(rng, 5)))
        assert np.abs(q.q).max() == 1.0
        assert normalize_inf(q) == q

    def test_zero_is_degenerate(self):
        with pytest.raises(ContractError, match="degenerate instance"):
            normalize_inf(QuboInstance(np.zeros((2, 2))))

    def test_gap_scales_and_minimizers_kept(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 11))
            m = random_upper(rng, n, scale=7.0)
            scale = np.abs(m).max()
            lo, _, gap, _, _ = brute_spectrum(m)
            nlo, _, ngap, _, _ = brute_spectrum(normalize_inf(QuboInstance(m)).q)
            if gap is not None:
                assert ngap == pytest.approx(gap / scale, rel=1e-9)
            e, ne = brute_energies(m), brute_energies(m / scale)
            assert set(np.flatnonzero(e <= lo + 1e-9)) == set(np.flatnonzero(ne <= nlo + 1e-9))


class TestTextFormat:
    def test_roundtrip_exact(self, rng, tmp_path):
        q = QuboInstance(random_upper(rng, 6))
        write_qubo(q, tmp_path / "q.txt")
        assert read_qubo(tmp_path / "q.txt") == q

    def test_layout(self):
        text = format_qubo(QuboInstance(np.array([[-0.5, 1.0], [0.0, -0.5]])))
        assert text.splitlines() == ["2", "0 0 -0.5", "0 1 1", "1 1 -0.5"]

    def test_comments_and_omitted_pairs(self):
        q = parse_qubo("# header\n3\n# entry\n0 2 1.5\n\n")
        expected = np.zeros((3, 3))
        expected[0, 2] = 1.5
        np.testing.assert_array_equal(q.q, expected)

    @pytest.mark.parametrize("text", ["", "2\n1 0 1.0\n", "2\n0 0\n", "2\n0 5 1.0\n", "x\n"])
    def test_malformed(self, text):
        with pytest.raises(ContractError):
            parse_qubo(text)


def test_state_packing_roundtrip():
    for idx in range(16):
        assert state_index(state_bits(idx, 4)) == idx
    assert state_bits(1, 2) == (1, 0)


def test_summary_invariants():
    with pytest.raises(ContractError):
        SpectrumSummary(0.0, None, 1.0, 1)
    with pytest.raises(ContractError):
        SpectrumSummary(0.0, 0.0, 0.0, 1)
    with pytest.raises(ContractError):
        SpectrumSummary(0.0, None, None, 0)
