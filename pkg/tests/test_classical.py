import numpy as np
import pytest

from biduct.classical import (
    ClassicalChannelError,
    ClassicalTwoWayChannel,
    JointInputDistribution,
    binary_multiplying_channel,
    classical_consistency_check,
    classical_identity_channel,
    conditional_mutual_information,
    noiseless_forward_channel,
    output_joint,
    product_distribution,
    shannon_inner_region,
    shannon_outer_region,
    shannon_rectangle,
)
from biduct.optimize import Budget
from biduct.region import hausdorff_distance, symmetric_rate
from biduct.sampling import random_conditional_pmf, rng_from

BUDGET = Budget(restarts=4, max_iters=300, seed=11)


def _h2(p):
    if p in (0.0, 1.0):
        return 0.0
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def _cmi_bruteforce(joint):
    """Direct summation of p log [p(x,y|z) / (p(x|z) p(y|z))]."""
    p_z = joint.sum(axis=(0, 1))
    p_xz = joint.sum(axis=1)
    p_yz = joint.sum(axis=0)
    total = 0.0
    nx, ny, nz = joint.shape
    for x in range(nx):
        for y in range(ny):
            for z in range(nz):
                pxyz = joint[x, y, z]
                if pxyz <= 0:
                    continue
                total += pxyz * np.log2(pxyz * p_z[z] / (p_xz[x, z] * p_yz[y, z]))
    return total


class TestValidation:
    def test_row_sum_enforced(self):
        pmf = np.zeros((2, 2, 2, 2))
        pmf[:, :, 0, 0] = 0.9
        with pytest.raises(ClassicalChannelError):
            ClassicalTwoWayChannel(pmf)

    def test_negative_rejected(self):
        pmf = np.zeros((2, 2, 2, 2))
        pmf[:, :, 0, 0] = 1.5
        pmf[:, :, 1, 1] = -0.5
        with pytest.raises(ClassicalChannelError):
            ClassicalTwoWayChannel(pmf)

    def test_product_flag_verified(self):
        with pytest.raises(ClassicalChannelError):
            JointInputDistribution(np.array([[0.5, 0.0], [0.0, 0.5]]), product_flag=True)
        product_distribution([0.3, 0.7], [0.6, 0.4])  # fine


class TestConditionalMutualInformation:
    def test_conditionally_independent_is_zero(self):
        # X and Y independent given Z: p(x,y,z) = p(z) p(x|z) p(y|z)
        rng = rng_from(1)
        p_z = rng.dirichlet(np.ones(2))
        joint = np.zeros((2, 2, 2))
        for z in range(2):
            px = rng.dirichlet(np.ones(2))
            py = rng.dirichlet(np.ones(2))
            joint[:, :, z] = p_z[z] * np.outer(px, py)
        assert conditional_mutual_information(joint) == pytest.approx(0.0, abs=1e-12)

    def test_trivial_z_perfect_correlation(self):
        joint = np.zeros((2, 2, 1))
        joint[0, 0, 0] = 0.5
        joint[1, 1, 0] = 0.5
        assert conditional_mutual_information(joint) == pytest.approx(1.0, abs=1e-12)

    def test_matches_bruteforce_on_random(self):
        for i in range(20):
            rng = rng_from(2, i)
            joint = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
            assert conditional_mutual_information(joint) == pytest.approx(
                _cmi_bruteforce(joint), abs=1e-10
            )

    def test_nonnegative(self):
        for i in range(30):
            joint = rng_from(3, i).dirichlet(np.ones(12)).reshape(2, 3, 2)
            assert conditional_mutual_information(joint) >= -1e-12


class TestShannonRectangle:
    def test_noiseless_forward_uniform(self):
        r = shannon_rectangle(noiseless_forward_channel(2),
                              product_distribution([0.5, 0.5], [0.5, 0.5]))
        assert r.r_fwd == pytest.approx(1.0, abs=1e-12)
        assert r.r_bwd == pytest.approx(0.0, abs=1e-12)

    def test_bmc_uniform_by_explicit_sum(self):
        w = binary_multiplying_channel()
        d = product_distribution([0.5, 0.5], [0.5, 0.5])
        r = shannon_rectangle(w, d)
        joint = output_joint(w, d)
        fwd = _cmi_bruteforce(joint.sum(axis=2).transpose(0, 2, 1))
        assert r.r_fwd == pytest.approx(fwd, abs=1e-12)
        assert r.r_fwd == pytest.approx(0.5, abs=1e-12)  # beta * H2(alpha) at 1/2, 1/2
        assert r.r_bwd == pytest.approx(0.5, abs=1e-12)

    def test_input_independent_outputs_carry_nothing(self):
        rng = rng_from(4)
        row = rng.dirichlet(np.ones(4)).reshape(2, 2)
        pmf = np.broadcast_to(row, (2, 2, 2, 2)).copy()
        w = ClassicalTwoWayChannel(pmf)
        r = shannon_rectangle(w, product_distribution([0.3, 0.7], [0.6, 0.4]))
        assert r.r_fwd == pytest.approx(0.0, abs=1e-12)
        assert r.r_bwd == pytest.approx(0.0, abs=1e-12)

    def test_alphabet_mismatch(self):
        with pytest.raises(ClassicalChannelError):
            shannon_rectangle(binary_multiplying_channel(),
                              JointInputDistribution(np.full((3, 3), 1 / 9)))


class TestShannonRegions:
    def test_noiseless_bidirectional_square(self):
        pmf = np.zeros((2, 2, 2, 2))
        for a in range(2):
            for b in range(2):
                pmf[a, b, b, a] = 1.0  # Alice hears b, Bob hears a
        w = ClassicalTwoWayChannel(pmf)
        region = shannon_inner_region(w, BUDGET, weights=(0.0, 0.5, 1.0))
        assert region.contains_point(1.0, 1.0, tol=1e-6)
        assert region.max_fwd == pytest.approx(1.0, abs=1e-9)
        assert region.max_bwd == pytest.approx(1.0, abs=1e-9)

    def test_bmc_symmetric_rate_vs_grid(self):
        w = binary_multiplying_channel()
        region = shannon_inner_region(w, BUDGET, weights=(0.0, 0.25, 0.5, 0.75, 1.0))
        # Grid oracle at 1e-3 for the module test (acceptance runs 1e-4).
        alphas = np.arange(1, 1000) / 1000.0
        h = np.array([_h2(a) for a in alphas])
        best = max(
            float(np.minimum(h[i] * alphas, alphas[i] * h).max())
            for i in range(len(alphas))
        )
        assert symmetric_rate(region) == pytest.approx(best, abs=1e-3)

    def test_inner_inside_outer_on_random_channels(self):
        for i in range(3):
            rng = rng_from(5, i)
            w = ClassicalTwoWayChannel(random_conditional_pmf(rng, 2, 2, 2, 2))
            inner = shannon_inner_region(w, BUDGET, weights=(0.0, 0.5, 1.0))
            outer = shannon_outer_region(w, BUDGET, weights=(0.0, 0.5, 1.0))
            assert outer.contains_region(inner, tol=1e-9)


class TestConsistency:
    def test_noiseless_forward(self):
        w = noiseless_forward_channel(2)
        d = product_distribution([0.5, 0.5], [0.5, 0.5])
        assert classical_consistency_check(w, d) <= 1e-9
        assert shannon_rectangle(w, d).r_fwd == pytest.approx(1.0, abs=1e-12)

    def test_bmc_uniform(self):
        w = binary_multiplying_channel()
        d = product_distribution([0.5, 0.5], [0.5, 0.5])
        assert classical_consistency_check(w, d) <= 1e-9

    def test_identity_channel_carries_marginal_entropy(self):
        # a'=a, b'=b: Bob already knows b, so the forward CMI is H(p_a)... only
        # the copy he receives is his own input, nothing about a arrives.
        w = classical_identity_channel(2)
        d = product_distribution([0.3, 0.7], [0.5, 0.5])
        r = shannon_rectangle(w, d)
        assert r.r_fwd == pytest.approx(0.0, abs=1e-12)
        assert classical_consistency_check(w, d) <= 1e-9

    def test_forwarding_channel_carries_marginal_entropy(self):
        # Bob receives a: the forward rate is exactly H(p_a).
        w = noiseless_forward_channel(2)
        d = product_distribution([0.3, 0.7], [0.5, 0.5])
        r = shannon_rectangle(w, d)
        assert r.r_fwd == pytest.approx(_h2(0.3), abs=1e-12)
        assert classical_consistency_check(w, d) <= 1e-9

    def test_random_channels(self):
        for i in range(5):
            rng = rng_from(6, i)
            na, nb = int(rng.integers(2, 4)), int(rng.integers(2, 4))
            w = ClassicalTwoWayChannel(random_conditional_pmf(rng, na, nb, na, nb))
            d = JointInputDistribution(rng.dirichlet(np.ones(na * nb)).reshape(na, nb))
            assert classical_consistency_check(w, d) <= 1e-9

    def test_dimension_guard(self):
        rng = rng_from(7)
        w = ClassicalTwoWayChannel(random_conditional_pmf(rng, 5, 5, 5, 5))
        d = JointInputDistribution(np.full((5, 5), 1 / 25))
        with pytest.raises(ClassicalChannelError):
            classical_consistency_check(w, d)


class TestEntanglementVacuousClassically:
    def test_embedded_bmc_forward_capacity(self):
        # The classical one-way forward optimum for the BMC is 1 bit (q_b = 1).
        from biduct.channels import embed_classical
        from biduct.optimize import one_way_capacity

        channel = embed_classical(binary_multiplying_channel())
        rep = one_way_capacity(channel, "forward",
                               Budget(restarts=4, max_iters=100, seed=12, ancilla_levels=(1, 2)))
        assert rep.best_value <= 1.0 + 2e-2
        assert rep.best_value >= 1.0 - 1e-6


def test_quantum_sweep_matches_shannon_region():
    from biduct.channels import embed_classical
    from biduct.region import inner_region

    w = binary_multiplying_channel()
    budget = Budget(restarts=2, max_iters=80, seed=13, ancilla_levels=(2,))
    weights = (0.0, 0.5, 1.0)
    quantum = inner_region(embed_classical(w), budget, weights=weights)
    shannon = shannon_inner_region(w, BUDGET, weights=weights)
    assert hausdorff_distance(quantum, shannon) <= 1e-2


def test_quantum_outer_sweep_matches_shannon_outer():
    from biduct.channels import embed_classical
    from biduct.region import outer_region

    w = binary_multiplying_channel()
    budget = Budget(restarts=2, max_iters=80, seed=14, ancilla_levels=(2,))
    weights = (0.0, 0.5, 1.0)
    quantum = outer_region(embed_classical(w), budget, weights=weights)
    shannon = shannon_outer_region(w, BUDGET, weights=weights)
    assert hausdorff_distance(quantum, shannon) <= 1e-2
    # the BMC outer bound strictly exceeds the inner bound on the diagonal
    assert symmetric_rate(shannon) > 0.66
