import numpy as np
import pytest

from biduct.additivity import (
    additivity_check,
    family_collapse_check,
    lemma_star_check,
    lemma_star_via_data_processing,
    lemma_star_via_ssa,
    random_eb_pair,
)
from biduct.channels import (
    EBVerdict,
    is_entanglement_breaking,
    measure_reprepare_basis,
    one_way_depolarizing,
    one_way_identity,
)
from biduct.optimize import Budget
from biduct.sampling import random_density_matrix, rng_from

Z0 = np.diag([1.0, 0.0]).astype(complex)
Z1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)

BUDGET = Budget(restarts=6, max_iters=250, seed=21)


class TestLemmaStar:
    def test_single_term_is_tight(self):
        rng = rng_from(1)
        s = lemma_star_check([1.0], [random_density_matrix(rng, 2)],
                             [random_density_matrix(rng, 3)])
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_identical_second_factor_is_tight(self):
        rng = rng_from(2)
        eta = random_density_matrix(rng, 2)
        s = lemma_star_check(
            [0.4, 0.6],
            [random_density_matrix(rng, 2), random_density_matrix(rng, 2)],
            [eta, eta],
        )
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_first_factors_saturate(self):
        # Orthogonal sigma's make S(sum p sigma (x) eta) = H(p) + sum p S(eta),
        # so the inequality is tight no matter what the eta's are.
        s = lemma_star_check([0.5, 0.5], [Z0, Z1], [Z0, PLUS])
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_overlapping_first_factors_give_positive_slack(self):
        # Swapping the lists produces genuine slack; value by eigendecomposition:
        # LHS has orthogonal flags on the second factor, RHS loses chi({p},{sigma}).
        s = lemma_star_check([0.5, 0.5], [Z0, PLUS], [Z0, Z1])
        lam = (2 + np.sqrt(2)) / 4
        expect = -(lam * np.log2(lam) + (1 - lam) * np.log2(1 - lam))
        assert s == pytest.approx(1.0 - expect, abs=1e-12)
        assert s > 0.1

    def test_proof_routes_agree(self):
        for i in range(20):
            rng = rng_from(3, i)
            k = int(rng.choice([2, 3, 4]))
            p = rng.dirichlet(np.ones(k))
            d_s = int(rng.choice([2, 3]))
            d_e = int(rng.choice([2, 3]))
            sig = [random_density_matrix(rng, d_s) for _ in range(k)]
            eta = [random_density_matrix(rng, d_e) for _ in range(k)]
            s = lemma_star_check(p, sig, eta)
            assert s >= -1e-10
            assert abs(s - lemma_star_via_data_processing(p, sig, eta)) <= 1e-9
            assert abs(s - lemma_star_via_ssa(p, sig, eta)) <= 1e-9

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            lemma_star_check([1.0], [Z0, Z1], [Z0])


class TestFamilyCollapse:
    def test_depolarizing_all_zero(self):
        rep = family_collapse_check(one_way_depolarizing(2), BUDGET)
        assert rep.zero_chi == pytest.approx(0.0, abs=1e-9)
        assert rep.product == pytest.approx(0.0, abs=1e-9)
        assert rep.separable == pytest.approx(0.0, abs=1e-9)
        assert rep.spread <= 1e-9

    def test_measure_reprepare_collapses_at_one_bit(self):
        # Classically this is the identity bit channel; Blahut-Arimoto gives 1.
        rep = family_collapse_check(measure_reprepare_basis(2), BUDGET)
        for val in (rep.zero_chi, rep.product, rep.separable):
            assert val == pytest.approx(1.0, abs=1e-6)
        assert rep.spread <= 2e-2
        assert rep.nesting_holds

    def test_identity_negative_control(self):
        rep = family_collapse_check(one_way_identity(2), BUDGET)
        assert rep.zero_chi == pytest.approx(1.0, abs=1e-6)
        assert rep.arbitrary == pytest.approx(2.0, abs=1e-6)
        assert rep.assisted_gap >= 0.5

    def test_random_eb_channel_collapses(self):
        m, _ = random_eb_pair(33)
        assert is_entanglement_breaking(m) is EBVerdict.EB
        rep = family_collapse_check(m, BUDGET)
        assert rep.nesting_holds
        assert rep.spread <= 2e-2


class TestAdditivity:
    def test_two_depolarizing_either_mode(self):
        dep = one_way_depolarizing(2)
        for mode in ("HOLEVO_EB", "EA"):
            rep = additivity_check(dep, dep, mode, Budget(restarts=2, max_iters=80, seed=22))
            assert rep.individual[0] == pytest.approx(0.0, abs=1e-8)
            assert rep.joint == pytest.approx(0.0, abs=1e-8)

    def test_ea_identity_pair_is_four_bits(self):
        rep = additivity_check(one_way_identity(2), one_way_identity(2), "EA",
                               Budget(restarts=4, max_iters=120, seed=23))
        assert rep.individual[0] == pytest.approx(2.0, abs=1e-9)
        assert rep.joint == pytest.approx(4.0, abs=2e-2)
        assert abs(rep.superadditivity_gap) <= 2e-2

    def test_holevo_eb_measure_reprepare_pair(self):
        m = measure_reprepare_basis(2)
        rep = additivity_check(m, m, "HOLEVO_EB", Budget(restarts=4, max_iters=200, seed=24))
        assert rep.individual[0] == pytest.approx(1.0, abs=1e-6)
        assert rep.joint == pytest.approx(2.0, abs=2e-2)

    def test_eb_precondition_enforced(self):
        with pytest.raises(ValueError):
            additivity_check(one_way_identity(2), measure_reprepare_basis(2),
                             "HOLEVO_EB", BUDGET)

    def test_random_eb_pair_is_eb(self):
        m1, m2 = random_eb_pair(34)
        assert is_entanglement_breaking(m1) is EBVerdict.EB
        assert is_entanglement_breaking(m2) is EBVerdict.EB

    def test_gap_sign_structure(self):
        # Product-certificate seeding keeps the joint estimate at or above the sum.
        m1, m2 = random_eb_pair(35)
        rep = additivity_check(m1, m2, "HOLEVO_EB", Budget(restarts=4, max_iters=200, seed=25))
        assert rep.superadditivity_gap >= -1e-9
