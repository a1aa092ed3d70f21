import numpy as np
import pytest

from biduct.sampling import random_density, random_density_matrix, random_unitary, rng_from
from biduct.states import (
    ALICE,
    BOB,
    DensityOperator,
    LayoutError,
    PureState,
    StateValidationError,
    SubsystemLayout,
    basis_state,
    entropy_of_matrix,
    epr_pair,
    fuse_labels,
    maximally_mixed,
    partial_trace,
    permute_subsystems,
    shannon_entropy,
    tensor,
    trace_distance,
    von_neumann_entropy,
)

QUBIT_A = SubsystemLayout.of(("A", 2, ALICE))
QUBIT_B = SubsystemLayout.of(("B", 2, BOB))


def _proj(vec, layout):
    v = np.asarray(vec, dtype=complex)
    return PureState(v / np.linalg.norm(v), layout).density()


class TestLayout:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(LayoutError):
            SubsystemLayout.of(("A", 2, ALICE), ("A", 2, BOB))

    def test_bad_dim_rejected(self):
        with pytest.raises(LayoutError):
            SubsystemLayout.of(("A", 0, ALICE))

    def test_unknown_party_rejected(self):
        with pytest.raises(LayoutError):
            SubsystemLayout.of(("A", 2, "carol"))

    def test_total_dim_and_subset(self):
        lay = SubsystemLayout.of(("A", 2, ALICE), ("B", 3, BOB), ("C", 2, BOB))
        assert lay.total_dim == 12
        sub = lay.subset({"C", "A"})
        assert sub.labels == ("A", "C")
        assert lay.party_labels(BOB) == ("B", "C")


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(StateValidationError):
            DensityOperator(m, QUBIT_A)

    def test_rejects_bad_trace(self):
        with pytest.raises(StateValidationError):
            DensityOperator(np.eye(2), QUBIT_A)

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(StateValidationError):
            DensityOperator(np.diag([1.5, -0.5]), QUBIT_A)

    def test_pure_state_norm(self):
        with pytest.raises(StateValidationError):
            PureState(np.array([1.0, 1.0]), QUBIT_A)


class TestTensor:
    def test_basis_states(self):
        z0 = _proj([1, 0], QUBIT_A)
        z1 = _proj([0, 1], QUBIT_B)
        out = tensor(z0, z1)
        expect = np.zeros((4, 4))
        expect[1, 1] = 1.0
        np.testing.assert_allclose(out.matrix, expect, atol=1e-15)

    def test_maximally_mixed(self):
        out = tensor(maximally_mixed(QUBIT_A), maximally_mixed(QUBIT_B))
        np.testing.assert_allclose(out.matrix, np.eye(4) / 4, atol=1e-15)

    def test_epr_with_ancilla_reduces_back(self):
        phi = epr_pair("A", "B").density()
        lay_c = SubsystemLayout.of(("C", 2, BOB))
        full = tensor(phi, _proj([1, 0], lay_c))
        evals = np.linalg.eigvalsh(full.matrix)
        assert evals[-1] == pytest.approx(1.0, abs=1e-12)  # rank 1 on 8 dims
        back = partial_trace(full, {"A", "B"})
        np.testing.assert_allclose(back.matrix, phi.matrix, atol=1e-12)

    def test_label_collision(self):
        with pytest.raises(LayoutError):
            tensor(maximally_mixed(QUBIT_A), maximally_mixed(QUBIT_A))


class TestPartialTrace:
    def test_epr_reduces_to_mixed(self):
        phi = epr_pair("A", "B").density()
        np.testing.assert_allclose(partial_trace(phi, {"A"}).matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state(self):
        rng = rng_from(1)
        rho = random_density(rng, QUBIT_A)
        sig = random_density(rng, QUBIT_B)
        out = partial_trace(tensor(rho, sig), {"A"})
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_pure_product_reduces_pure(self):
        z01 = tensor(_proj([1, 0], QUBIT_A), _proj([0, 1], QUBIT_B))
        for keep in ({"A"}, {"B"}):
            red = partial_trace(z01, keep)
            assert np.linalg.eigvalsh(red.matrix)[-1] == pytest.approx(1.0, abs=1e-12)

    def test_unknown_label(self):
        with pytest.raises(LayoutError):
            partial_trace(maximally_mixed(QUBIT_A), {"Z"})

    def test_sequential_matches_joint(self):
        lay = SubsystemLayout.of(("A", 2, ALICE), ("Ap", 2, ALICE), ("B", 3, BOB))
        rho = random_density(rng_from(2), lay)
        seq = partial_trace(partial_trace(rho, {"Ap", "B"}), {"B"})
        joint = partial_trace(rho, {"B"})
        np.testing.assert_allclose(seq.matrix, joint.matrix, atol=1e-12)


class TestPermutation:
    def test_round_trip(self):
        lay = SubsystemLayout.of(("A", 2, ALICE), ("B", 3, BOB), ("C", 2, BOB))
        rho = random_density(rng_from(3), lay)
        perm = permute_subsystems(rho, ["C", "A", "B"])
        assert perm.layout.labels == ("C", "A", "B")
        back = permute_subsystems(perm, ["A", "B", "C"])
        np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-14)

    def test_fuse_requires_consecutive(self):
        lay = SubsystemLayout.of(("A", 2, ALICE), ("B", 2, BOB), ("C", 2, ALICE))
        rho = random_density(rng_from(4), lay)
        with pytest.raises(LayoutError):
            fuse_labels(rho, ["A", "C"], "AC")
        fused = fuse_labels(permute_subsystems(rho, ["A", "C", "B"]), ["A", "C"], "AC")
        assert fused.layout.labels == ("AC", "B")
        assert fused.layout.dims == (4, 2)


class TestEntropy:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(_proj([1, 1], QUBIT_A)) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_one_bit(self):
        assert von_neumann_entropy(maximally_mixed(QUBIT_A)) == pytest.approx(1.0, abs=1e-14)

    def test_quarter_three_quarter(self):
        rho = DensityOperator(np.diag([0.25, 0.75]), QUBIT_A)
        expect = 2.0 - 0.75 * np.log2(3.0)  # -sum p log p evaluated directly
        assert von_neumann_entropy(rho) == pytest.approx(expect, abs=1e-12)
        assert expect == pytest.approx(0.811278, abs=1e-6)

    def test_range(self):
        for i in range(20):
            rho = random_density(rng_from(5, i), QUBIT_A)
            s = von_neumann_entropy(rho)
            assert -1e-12 <= s <= 1.0 + 1e-12

    def test_concavity(self):
        for i in range(50):
            rng = rng_from(6, i)
            a = random_density_matrix(rng, 3)
            b = random_density_matrix(rng, 3)
            lam = rng.uniform()
            mixed = entropy_of_matrix(lam * a + (1 - lam) * b)
            parts = lam * entropy_of_matrix(a) + (1 - lam) * entropy_of_matrix(b)
            assert mixed >= parts - 1e-9

    def test_additive_on_products(self):
        for i in range(30):
            rng = rng_from(7, i)
            a = random_density_matrix(rng, 2)
            b = random_density_matrix(rng, 3)
            assert entropy_of_matrix(np.kron(a, b)) == pytest.approx(
                entropy_of_matrix(a) + entropy_of_matrix(b), abs=1e-9
            )

    def test_strong_subadditivity(self):
        lay = SubsystemLayout.of(("X", 2, ALICE), ("Y", 2, ALICE), ("Z", 2, ALICE))
        for i in range(50):
            rho = random_density(rng_from(8, i), lay)
            s_abc = von_neumann_entropy(rho)
            s_ab = von_neumann_entropy(partial_trace(rho, {"X", "Y"}))
            s_ac = von_neumann_entropy(partial_trace(rho, {"X", "Z"}))
            s_a = von_neumann_entropy(partial_trace(rho, {"X"}))
            assert s_abc + s_a <= s_ab + s_ac + 1e-9


class TestTraceDistance:
    def test_self_distance_zero(self):
        rho = random_density(rng_from(9), QUBIT_A)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        assert trace_distance(_proj([1, 0], QUBIT_A), _proj([0, 1], QUBIT_A)) == pytest.approx(
            1.0, abs=1e-14
        )

    def test_pure_state_overlap_calibration(self):
        # |<a|b>|^2 = 1 - eps^2 must give distance eps; eps = 0.6 so cos = 0.8.
        alpha = _proj([1, 0], QUBIT_A)
        beta = _proj([0.8, 0.6], QUBIT_A)
        assert trace_distance(alpha, beta) == pytest.approx(0.6, abs=1e-12)

    def test_symmetric_triangle_range(self):
        rng = rng_from(10)
        rhos = [random_density(rng, QUBIT_A) for _ in range(3)]
        d01 = trace_distance(rhos[0], rhos[1])
        d12 = trace_distance(rhos[1], rhos[2])
        d02 = trace_distance(rhos[0], rhos[2])
        assert d01 == pytest.approx(trace_distance(rhos[1], rhos[0]), abs=1e-14)
        assert d02 <= d01 + d12 + 1e-12
        assert 0.0 <= d01 <= 1.0

    def test_unitary_invariance(self):
        rng = rng_from(11)
        rho = random_density(rng, QUBIT_A)
        sig = random_density(rng, QUBIT_A)
        u = random_unitary(rng, 2)
        rho_u = DensityOperator(u @ rho.matrix @ u.conj().T, QUBIT_A)
        sig_u = DensityOperator(u @ sig.matrix @ u.conj().T, QUBIT_A)
        assert trace_distance(rho_u, sig_u) == pytest.approx(
            trace_distance(rho, sig), abs=1e-10
        )

    def test_layout_mismatch(self):
        with pytest.raises(LayoutError):
            trace_distance(maximally_mixed(QUBIT_A), maximally_mixed(QUBIT_B))


class TestShannonEntropy:
    def test_deterministic(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0

    def test_uniform_binary(self):
        assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-14)

    def test_quarter(self):
        assert shannon_entropy([0.25, 0.75]) == pytest.approx(2 - 0.75 * np.log2(3), abs=1e-12)

    def test_negative_entry_rejected(self):
        with pytest.raises(ValueError):
            shannon_entropy([1.2, -0.2])

    def test_bad_sum_rejected(self):
        with pytest.raises(ValueError):
            shannon_entropy([0.5, 0.4])


def test_basis_state_indexing():
    lay = SubsystemLayout.of(("A", 2, ALICE), ("B", 3, BOB))
    v = basis_state(lay, [1, 2]).vector
    assert v[1 * 3 + 2] == 1.0
    with pytest.raises(LayoutError):
        basis_state(lay, [2, 0])
