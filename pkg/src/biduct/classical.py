"""Classical two-way channels: Shannon's inner/outer bounds and the quantum reduction.

A classical two-way channel is the conditional pmf p(a', b' | a, b).  Its
per-use rectangle is rect{I(A;B'|B)}{I(B;A'|A)}; sweeping input distributions
and taking the hull reproduces Shannon's bounds, and embedding the channel as
a dephasing quantum operation must reproduce the same numbers through the
Holevo stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .region import (
    INNER,
    OUTER,
    RateRectangle,
    RateRegion,
    _budget_meta,
    rect_from_deltas,
    region_from_rectangles,
)
from .optimize import Budget
from .sampling import rng_from
from .states import shannon_entropy

ROW_SUM_TOL = 1e-12
CONSISTENCY_DIM_LIMIT = 256


class ClassicalChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ClassicalTwoWayChannel:
    """Conditional pmf tensor indexed [a, b, a_out, b_out]."""

    pmf: np.ndarray

    def __post_init__(self):
        p = np.array(self.pmf, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "pmf", p)
        if p.ndim != 4:
            raise ClassicalChannelError(f"pmf must be 4-dimensional, got shape {p.shape}")
        if p.min() < 0.0:
            raise ClassicalChannelError(f"negative conditional probability {p.min():.3e}")
        sums = p.sum(axis=(2, 3))
        bad = np.unravel_index(np.argmax(np.abs(sums - 1.0)), sums.shape)
        dev = abs(sums[bad] - 1.0)
        if dev > ROW_SUM_TOL:
            raise ClassicalChannelError(
                f"row (a={bad[0]}, b={bad[1]}) sums to 1 +/- {dev:.3e}"
            )

    @property
    def alphabets(self) -> tuple[int, int, int, int]:
        return self.pmf.shape


@dataclass(frozen=True, eq=False)
class JointInputDistribution:
    """Joint pmf over the two senders' input letters."""

    p_ab: np.ndarray
    product_flag: bool = False

    def __post_init__(self):
        p = np.array(self.p_ab, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p_ab", p)
        if p.ndim != 2:
            raise ClassicalChannelError("joint input distribution must be a matrix")
        if p.min() < 0.0:
            raise ClassicalChannelError(f"negative input probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > ROW_SUM_TOL:
            raise ClassicalChannelError(f"input pmf sums to 1 +/- {abs(p.sum() - 1.0):.3e}")
        if self.product_flag:
            s = np.linalg.svd(p, compute_uv=False)
            if len(s) > 1 and s[1] > 1e-10:
                raise ClassicalChannelError(
                    f"product_flag set but second singular value is {s[1]:.3e}"
                )


def product_distribution(p_a, q_b) -> JointInputDistribution:
    return JointInputDistribution(np.outer(np.asarray(p_a, float), np.asarray(q_b, float)), True)


def conditional_mutual_information(joint_xyz: np.ndarray) -> float:
    """I(X;Y|Z) = H(XZ) + H(YZ) - H(Z) - H(XYZ), all from one joint pmf."""
    p = np.asarray(joint_xyz, dtype=float)
    if p.ndim != 3:
        raise ClassicalChannelError("need a joint pmf over exactly (X, Y, Z)")
    if p.min() < -1e-15:
        raise ClassicalChannelError(f"negative joint probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ClassicalChannelError(f"joint pmf sums to 1 +/- {abs(p.sum() - 1.0):.3e}")
    h_xz = shannon_entropy(p.sum(axis=1).reshape(-1))
    h_yz = shannon_entropy(p.sum(axis=0).reshape(-1))
    h_z = shannon_entropy(p.sum(axis=(0, 1)).reshape(-1))
    h_xyz = shannon_entropy(p.reshape(-1))
    return h_xz + h_yz - h_z - h_xyz


def output_joint(w: ClassicalTwoWayChannel, d: JointInputDistribution) -> np.ndarray:
    """Joint pmf over (a, b, a', b')."""
    na, nb, _, _ = w.alphabets
    if d.p_ab.shape != (na, nb):
        raise ClassicalChannelError(
            f"input alphabet {d.p_ab.shape} does not match channel {(na, nb)}"
        )
    return d.p_ab[:, :, None, None] * w.pmf


def shannon_rectangle(w: ClassicalTwoWayChannel, d: JointInputDistribution) -> RateRectangle:
    """(I(A;B'|B), I(B;A'|A)) for one input distribution."""
    joint = output_joint(w, d)
    fwd = conditional_mutual_information(joint.sum(axis=2).transpose(0, 2, 1))  # X=A Y=B' Z=B
    bwd = conditional_mutual_information(joint.sum(axis=3).transpose(1, 2, 0))  # X=B Y=A' Z=A
    return rect_from_deltas(fwd, bwd)


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _sweep_product(w: ClassicalTwoWayChannel, weights, budget: Budget):
    """Per-weight optimal product inputs; NM over softmax parameters."""
    seed = budget.require_seed()
    na, nb, _, _ = w.alphabets
    results = []
    for wi, lam in enumerate(weights):
        def value(p_a, q_b) -> float:
            r = shannon_rectangle(w, product_distribution(p_a, q_b))
            return lam * r.r_fwd + (1.0 - lam) * r.r_bwd

        def neg(x):
            return -value(_softmax(x[:na]), _softmax(x[na:]))

        best = (-np.inf, None, None)
        starts = [np.zeros(na + nb)]
        for i in range(max(budget.restarts - 1, 0)):
            starts.append(rng_from(seed, 61, wi, i).standard_normal(na + nb))
        for x0 in starts:
            res = minimize(neg, x0, method="Nelder-Mead",
                           options={"maxfev": budget.max_iters, "xatol": 1e-9, "fatol": 1e-12})
            p_a, q_b = _softmax(res.x[:na]), _softmax(res.x[na:])
            v = value(p_a, q_b)
            if v > best[0]:
                best = (v, p_a, q_b)
        results.append((lam, best[1], best[2]))
    return results


def shannon_optimal_products(w: ClassicalTwoWayChannel,
                             weights: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                             budget: Budget | None = None):
    """Product input distributions tracing the inner boundary; used as warm starts."""
    budget = budget or Budget(restarts=6, max_iters=400, seed=1)
    return [(p, q) for _, p, q in _sweep_product(w, weights, budget)]


DEFAULT_WEIGHTS = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


def shannon_inner_region(w: ClassicalTwoWayChannel, budget: Budget,
                         weights: Sequence[float] = DEFAULT_WEIGHTS,
                         channel_id: str = "") -> RateRegion:
    """Hull of rectangles over product input distributions p_ab = p_a q_b."""
    rects = [
        shannon_rectangle(w, product_distribution(p, q))
        for _, p, q in _sweep_product(w, weights, budget)
    ]
    meta = {"channel": channel_id, "family": "product-inputs", "budget": _budget_meta(budget)}
    return region_from_rectangles(rects, INNER, meta=meta, heuristic=False)


def _sweep_joint(w: ClassicalTwoWayChannel, weights, budget: Budget):
    """Per-weight optimal joint inputs, seeded with the product optimum."""
    seed = budget.require_seed()
    na, nb, _, _ = w.alphabets
    product_pts = _sweep_product(w, weights, budget)
    results = []
    for wi, (lam, p_a, q_b) in enumerate(product_pts):
        def value(p_ab: np.ndarray) -> float:
            r = shannon_rectangle(w, JointInputDistribution(p_ab))
            return lam * r.r_fwd + (1.0 - lam) * r.r_bwd

        def neg(x):
            return -value(_softmax(x).reshape(na, nb))

        best = (value(np.outer(p_a, q_b)), np.outer(p_a, q_b))
        seed_x = np.log(np.maximum(np.outer(p_a, q_b).reshape(-1), 1e-18))
        starts = [seed_x, np.zeros(na * nb)]
        for i in range(max(budget.restarts - 2, 0)):
            starts.append(rng_from(seed, 67, wi, i).standard_normal(na * nb))
        for x0 in starts:
            res = minimize(neg, x0, method="Nelder-Mead",
                           options={"maxfev": budget.max_iters, "xatol": 1e-9, "fatol": 1e-12})
            p_ab = _softmax(res.x).reshape(na, nb)
            v = value(p_ab)
            if v > best[0]:
                best = (v, p_ab)
        results.append((lam, p_a, q_b, best[1]))
    return results


def shannon_optimal_joints(w: ClassicalTwoWayChannel,
                           weights: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                           budget: Budget | None = None):
    """Arbitrary joint input distributions tracing the outer boundary."""
    budget = budget or Budget(restarts=6, max_iters=400, seed=1)
    return [p_ab for _, _, _, p_ab in _sweep_joint(w, weights, budget)]


def shannon_outer_region(w: ClassicalTwoWayChannel, budget: Budget,
                         weights: Sequence[float] = DEFAULT_WEIGHTS,
                         channel_id: str = "") -> RateRegion:
    """Hull over arbitrary joint inputs; reruns the product sweep so inner stays inside."""
    rects = []
    for _, p_a, q_b, p_ab in _sweep_joint(w, weights, budget):
        rects.append(shannon_rectangle(w, product_distribution(p_a, q_b)))
        rects.append(shannon_rectangle(w, JointInputDistribution(p_ab)))
    meta = {"channel": channel_id, "family": "joint-inputs", "budget": _budget_meta(budget)}
    return region_from_rectangles(rects, OUTER, meta=meta, heuristic=False)


# ---------------------------------------------------------------------------
# Quantum embedding consistency.
# ---------------------------------------------------------------------------


def classical_message_ensemble(w: ClassicalTwoWayChannel, p_ab: np.ndarray,
                               ancilla_dims: tuple[int, int] | None = None):
    """The dephased-input ensemble {p_ab, |a a> |b b>} with copies on the ancillas."""
    from .optimize import standard_layout
    from .channels import ChannelDims
    from .ensembles import Ensemble
    from .states import PureState

    na, nb, _, _ = w.alphabets
    anc = ancilla_dims or (na, nb)
    if anc[0] < na or anc[1] < nb:
        raise ClassicalChannelError("copy registers must be at least alphabet-sized")
    layout = standard_layout(ChannelDims(*w.alphabets), anc)
    members = []
    for a in range(na):
        for b in range(nb):
            if p_ab[a, b] < 0:
                raise ClassicalChannelError("negative input probability")
            v = np.zeros(layout.total_dim, dtype=complex)
            flat = ((a * anc[0] + a) * nb + b) * anc[1] + b
            v[flat] = 1.0
            members.append((float(p_ab[a, b]), PureState(v, layout).density()))
    return Ensemble(tuple(members))


def classical_consistency_check(w: ClassicalTwoWayChannel, d: JointInputDistribution) -> float:
    """Max deviation between the quantum-stack Holevo gains and Shannon's CMIs."""
    from .channels import embed_classical
    from .ensembles import delta_chi_backward, delta_chi_forward

    na, nb, na_o, nb_o = w.alphabets
    total = (na * na) * (nb * nb)
    total_out = (na_o * na) * (nb_o * nb)
    if max(total, total_out) > CONSISTENCY_DIM_LIMIT:
        raise ClassicalChannelError(
            f"embedded dimension {max(total, total_out)} exceeds {CONSISTENCY_DIM_LIMIT}"
        )
    channel = embed_classical(w)
    ens = classical_message_ensemble(w, d.p_ab)
    rect = shannon_rectangle(w, d)
    dev_f = abs(delta_chi_forward(channel, ens) - rect.r_fwd)
    dev_b = abs(delta_chi_backward(channel, ens) - rect.r_bwd)
    return max(dev_f, dev_b)


# ---------------------------------------------------------------------------
# Canonical channels.
# ---------------------------------------------------------------------------


def binary_multiplying_channel() -> ClassicalTwoWayChannel:
    """Shannon's BMC: both parties receive the product a*b."""
    pmf = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            c = a * b
            pmf[a, b, c, c] = 1.0
    return ClassicalTwoWayChannel(pmf)


def noiseless_forward_channel(n: int = 2) -> ClassicalTwoWayChannel:
    """Bob receives a, Alice receives a constant 0; nothing flows backward."""
    pmf = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            pmf[a, b, 0, a] = 1.0
    return ClassicalTwoWayChannel(pmf)


def classical_identity_channel(n: int = 2) -> ClassicalTwoWayChannel:
    """Do-nothing channel: each party gets their own input back."""
    pmf = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            pmf[a, b, a, b] = 1.0
    return ClassicalTwoWayChannel(pmf)


def binary_symmetric_forward(flip: float) -> ClassicalTwoWayChannel:
    """Forward BSC with flip probability; Alice's output is constant."""
    pmf = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            pmf[a, b, 0, a] = 1.0 - flip
            pmf[a, b, 0, 1 - a] = flip
    return ClassicalTwoWayChannel(pmf)
