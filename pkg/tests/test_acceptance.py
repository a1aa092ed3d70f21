"""Acceptance gate: every primary criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <n> PASS|FAIL` line.  Budgets are sized so
the whole module stays well inside the per-criterion runtime caps while the
structural guarantees (warm starts, product-certificate seeding) carry the
tolerances.
"""

import json
import time

import numpy as np

from biduct.additivity import (
    additivity_check,
    family_collapse_check,
    lemma_star_check,
    lemma_star_via_data_processing,
    lemma_star_via_ssa,
    random_eb_pair,
)
from biduct.channels import OneWayChannel, embed_one_way, one_way_identity, swap_channel
from biduct.classical import (
    ClassicalTwoWayChannel,
    JointInputDistribution,
    binary_multiplying_channel,
    classical_consistency_check,
    shannon_inner_region,
)
from biduct.cli import main
from biduct.ensembles import MessageEnsemble, chi_bar_forward, chi_forward
from biduct.optimize import Budget, bsst_capacity, bsst_objective, one_way_capacity
from biduct.region import (
    RateRectangle,
    inner_region,
    outer_region,
    region_from_rectangles,
    symmetric_rate,
)
from biduct.sampling import (
    random_conditional_pmf,
    random_density,
    random_density_matrix,
    random_kraus_set,
    rng_from,
)
from biduct.states import ALICE, BOB, SubsystemLayout, shannon_entropy
from biduct.wire import channel_spec_to_json

SEED = 2026


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {status} {name}" + (f" [{detail}]" if detail else ""))


def test_criterion_01_classical_reduction_identity():
    t0 = time.time()
    worst = 0.0
    for i in range(50):
        rng = rng_from(SEED, 1, i)
        na = int(rng.integers(2, 4))
        nb = int(rng.integers(2, 4))
        w = ClassicalTwoWayChannel(random_conditional_pmf(rng, na, nb, na, nb))
        d = JointInputDistribution(rng.dirichlet(np.ones(na * nb)).reshape(na, nb))
        worst = max(worst, classical_consistency_check(w, d))
    ok = worst <= 1e-9
    _report(1, "classical reduction identity", ok,
            f"max dev {worst:.2e}, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_02_lemma_star_suite():
    t0 = time.time()
    min_slack = np.inf
    max_route_dev = 0.0
    for i in range(1000):
        rng = rng_from(SEED, 2, i)
        k = int(rng.choice([2, 3, 4]))
        d_s = int(rng.choice([2, 3]))
        d_e = int(rng.choice([2, 3]))
        p = rng.dirichlet(np.ones(k))
        sig = [random_density_matrix(rng, d_s) for _ in range(k)]
        eta = [random_density_matrix(rng, d_e) for _ in range(k)]
        s = lemma_star_check(p, sig, eta)
        dev = max(
            abs(s - lemma_star_via_data_processing(p, sig, eta)),
            abs(s - lemma_star_via_ssa(p, sig, eta)),
        )
        min_slack = min(min_slack, s)
        max_route_dev = max(max_route_dev, dev)
    ok = min_slack >= -1e-10 and max_route_dev <= 1e-9
    _report(2, "product-mixture entropy inequality", ok,
            f"min slack {min_slack:.2e}, route dev {max_route_dev:.2e}, "
            f"{time.time() - t0:.1f}s")
    assert ok


def test_criterion_03_joint_entropy_identity():
    t0 = time.time()
    core = SubsystemLayout.of(("A", 2, ALICE), ("B", 2, BOB))
    worst = 0.0
    for i in range(200):
        rng = rng_from(SEED, 3, i)
        na = int(rng.integers(2, 4))
        nb = int(rng.integers(2, 4))
        p_ab = rng.dirichlet(np.ones(na * nb)).reshape(na, nb)
        states = tuple(
            tuple(random_density(rng, core) for _ in range(nb)) for _ in range(na)
        )
        me = MessageEnsemble(p_ab, states)
        lhs = chi_forward(me.flatten())
        rhs = shannon_entropy(me.marginal_b()) + chi_bar_forward(me)
        worst = max(worst, abs(lhs - rhs))
    ok = worst <= 1e-10
    _report(3, "joint-entropy identity", ok, f"max dev {worst:.2e}, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_04_swap_one_way_capacity():
    t0 = time.time()
    rep = one_way_capacity(swap_channel(2), "forward",
                           Budget(restarts=8, max_iters=150, seed=SEED))
    ok = abs(rep.best_value - 2.0) <= 1e-3
    _report(4, "SWAP one-way capacity", ok,
            f"value {rep.best_value:.6f}, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_05_bsst_cross_check():
    t0 = time.time()
    budget = Budget(restarts=8, max_iters=150, seed=SEED)
    worst = 0.0
    for i in range(20):
        rng = rng_from(SEED, 5, i)
        m = OneWayChannel(tuple(random_kraus_set(rng, 2, 2, int(rng.integers(2, 5)))), 2, 2)
        b = bsst_capacity(m, budget.replace(max_iters=500))
        c = one_way_capacity(embed_one_way(m), "forward", budget)
        worst = max(worst, abs(b.best_value - c.best_value))
    # concavity of the mutual-information objective: 100 midpoint checks
    concave_ok = True
    for i in range(100):
        rng = rng_from(SEED, 55, i)
        m = OneWayChannel(tuple(random_kraus_set(rng, 2, 2, 3)), 2, 2)
        r1 = random_density_matrix(rng, 2)
        r2 = random_density_matrix(rng, 2)
        lam = rng.uniform()
        mid = bsst_objective(m, lam * r1 + (1 - lam) * r2)
        lo = lam * bsst_objective(m, r1) + (1 - lam) * bsst_objective(m, r2)
        if mid < lo - 1e-9:
            concave_ok = False
    ok = worst <= 1e-2 and concave_ok
    _report(5, "BSST cross-check", ok,
            f"max |delta-chi - QMI| {worst:.2e}, concavity {'ok' if concave_ok else 'violated'}, "
            f"{time.time() - t0:.0f}s")
    assert ok


def test_criterion_06_ea_additivity():
    t0 = time.time()
    budget = Budget(restarts=8, max_iters=150, seed=SEED)
    worst = 0.0
    for i in range(10):
        m1 = OneWayChannel(tuple(random_kraus_set(rng_from(SEED, 6, i, 0), 2, 2, 3)), 2, 2)
        m2 = OneWayChannel(tuple(random_kraus_set(rng_from(SEED, 6, i, 1), 2, 2, 3)), 2, 2)
        rep = additivity_check(m1, m2, "EA", budget)
        gap = rep.superadditivity_gap
        assert gap >= -2e-2, f"pair {i}: joint fell below the product seed"
        worst = max(worst, abs(gap))
    ok = worst <= 2e-2
    _report(6, "entanglement-assisted additivity", ok,
            f"max |gap| {worst:.2e}, {time.time() - t0:.0f}s")
    assert ok


def test_criterion_07_eb_collapse():
    t0 = time.time()
    budget = Budget(restarts=6, max_iters=200, seed=SEED)
    worst_spread = 0.0
    nesting_ok = True
    for i in range(10):
        m, _ = random_eb_pair(SEED * 100 + i)
        rep = family_collapse_check(m, budget)
        worst_spread = max(worst_spread, rep.spread)
        nesting_ok = nesting_ok and rep.nesting_holds
    control = family_collapse_check(one_way_identity(2), budget)
    control_ok = control.assisted_gap >= 0.5
    ok = worst_spread <= 2e-2 and nesting_ok and control_ok
    _report(7, "entanglement-breaking collapse", ok,
            f"max spread {worst_spread:.2e}, nesting {'ok' if nesting_ok else 'broken'}, "
            f"control gap {control.assisted_gap:.3f}, {time.time() - t0:.0f}s")
    assert ok


def test_criterion_08_eb_holevo_additivity():
    t0 = time.time()
    budget = Budget(restarts=8, max_iters=250, seed=SEED)
    worst = 0.0
    for i in range(10):
        m1, m2 = random_eb_pair(SEED * 200 + i)
        rep = additivity_check(m1, m2, "HOLEVO_EB", budget)
        worst = max(worst, abs(rep.superadditivity_gap))
    ok = worst <= 2e-2
    _report(8, "EB Holevo additivity", ok, f"max |gap| {worst:.2e}, {time.time() - t0:.0f}s")
    assert ok


def test_criterion_09_shannon_bmc_inner_bound():
    t0 = time.time()
    # Ground truth: 1e-4 grid over product (p, q), maximizing min(I_fwd, I_bwd).
    alphas = np.arange(1, 10000) / 10000.0
    h = -(alphas * np.log2(alphas) + (1 - alphas) * np.log2(1 - alphas))
    oracle = 0.0
    for i in range(len(alphas)):
        oracle = max(oracle, float(np.minimum(h[i] * alphas, alphas[i] * h).max()))
    region = shannon_inner_region(
        binary_multiplying_channel(), Budget(restarts=6, max_iters=400, seed=SEED)
    )
    rate = symmetric_rate(region)
    ok = abs(rate - 0.6169) <= 1e-3 and abs(oracle - 0.6169) <= 1e-3 \
        and abs(rate - oracle) <= 1e-3
    _report(9, "Shannon BMC inner bound", ok,
            f"rate {rate:.5f}, oracle {oracle:.5f}, {time.time() - t0:.1f}s")
    assert ok


def test_criterion_10_region_geometry():
    t0 = time.time()
    from scipy.spatial import ConvexHull

    geometry_ok = True
    for i in range(20):
        rng = rng_from(SEED, 10, i)
        rects = [
            RateRectangle(float(rng.uniform(0, 2.5)), float(rng.uniform(0, 2.5)))
            for _ in range(int(rng.integers(1, 8)))
        ]
        region = region_from_rectangles(rects, "INNER")
        pts = [(0.0, 0.0)]
        for r in rects:
            pts.extend([(r.r_fwd, r.r_bwd), (r.r_fwd, 0.0), (0.0, r.r_bwd)])
        pts = np.array(pts)
        hull = ConvexHull(pts)
        xs = np.arange(0.0, pts[:, 0].max() + 0.01, 0.01)
        ys = np.arange(0.0, pts[:, 1].max() + 0.01, 0.01)
        gx, gy = np.meshgrid(xs, ys)
        flat = np.stack([gx.reshape(-1), gy.reshape(-1)], axis=1)
        vals = flat @ hull.equations[:, :2].T + hull.equations[:, 2]
        inside = (vals <= 1e-9).all(axis=1)
        for (x, y), expect in zip(flat, inside):
            got = region.contains_point(x, y, tol=1e-9)
            if got != expect:
                bh = region.boundary_height(min(x, region.max_fwd))
                if abs(y - bh) >= 1e-7:  # a genuine misclassification
                    geometry_ok = False
    sweep_budget = Budget(restarts=2, max_iters=60, seed=SEED, ancilla_levels=(2,))
    inner = inner_region(swap_channel(2), sweep_budget, weights=(0.5,))
    outer = outer_region(swap_channel(2), sweep_budget, weights=(0.5,))
    containment_ok = outer.contains_region(inner, tol=1e-9)
    ok = geometry_ok and containment_ok
    _report(10, "region geometry", ok,
            f"grid {'ok' if geometry_ok else 'mismatch'}, "
            f"inner-in-outer {'ok' if containment_ok else 'broken'}, {time.time() - t0:.0f}s")
    assert ok


def test_criterion_11_deterministic_payloads(tmp_path, capsys):
    t0 = time.time()

    def payload_of(argv):
        code = main(argv)
        assert code == 0
        out = capsys.readouterr().out.splitlines()[-1]
        return json.dumps(json.loads(out)["payload"], sort_keys=True)

    spec_1w = tmp_path / "id1w.json"
    spec_1w.write_text(json.dumps(channel_spec_to_json(one_way_identity(2))))
    spec_sw = tmp_path / "swap.json"
    spec_sw.write_text(json.dumps(channel_spec_to_json(swap_channel(2))))
    spec_bmc = tmp_path / "bmc.json"
    spec_bmc.write_text(json.dumps(channel_spec_to_json(binary_multiplying_channel())))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"instances": 20}))

    commands = [
        ["capacity", "--spec", str(spec_1w), "--seed", "5",
         "--budget-restarts", "2", "--budget-iters", "60", "--ancilla-levels", "2"],
        ["region", "--spec", str(spec_bmc), "--kind", "shannon-inner", "--seed", "5",
         "--budget-restarts", "2", "--budget-iters", "120"],
        ["region", "--spec", str(spec_sw), "--kind", "inner", "--seed", "5",
         "--budget-restarts", "2", "--budget-iters", "50", "--ancilla-levels", "2"],
        ["suite", "--name", "lemma-star", "--seed", "5", "--config", str(cfg)],
    ]
    ok = True
    for argv in commands:
        if payload_of(argv) != payload_of(argv):
            ok = False
    _report(11, "seeded determinism", ok, f"{len(commands)} commands, {time.time() - t0:.0f}s")
    assert ok
