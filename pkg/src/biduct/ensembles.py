"""Ensembles, Holevo information, local/readjusted variants, and per-use differences.

chi(E) = S(sum_i p_i rho_i) - sum_i p_i S(rho_i).  The forward local value
chi_fwd traces out every subsystem owned by Alice (what Bob holds determines
what he can learn), and dually for chi_bwd.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import TwoWayChannel, apply
from .states import (
    ALICE,
    BOB,
    DensityOperator,
    LayoutError,
    SubsystemLayout,
    entropy_of_matrix,
    tensor,
)

PROB_SUM_TOL = 1e-10


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Finite list of (probability, state) over one shared layout."""

    members: tuple[tuple[float, DensityOperator], ...]

    def __post_init__(self):
        if not self.members:
            raise EnsembleError("ensemble needs at least one member")
        object.__setattr__(
            self, "members", tuple((float(p), rho) for p, rho in self.members)
        )
        lay = self.members[0][1].layout
        total = 0.0
        for p, rho in self.members:
            if p < 0.0:
                raise EnsembleError(f"negative probability {p}")
            if rho.layout != lay:
                raise EnsembleError("members do not share one layout")
            total += p
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise EnsembleError(f"probabilities sum to 1 +/- {abs(total - 1.0):.3e}")

    @property
    def layout(self) -> SubsystemLayout:
        return self.members[0][1].layout

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    def average_state(self) -> DensityOperator:
        acc = sum(p * rho.matrix for p, rho in self.members)
        return DensityOperator._trusted(acc, self.layout)

    def reduce(self, keep: Sequence[str]) -> "Ensemble":
        from .states import partial_trace

        return Ensemble(tuple((p, partial_trace(rho, keep)) for p, rho in self.members))

    def reduce_to_party(self, party: str) -> "Ensemble":
        keep = self.layout.party_labels(party)
        if not keep:
            raise LayoutError(f"no subsystems owned by {party!r}")
        return self.reduce(keep)


def holevo_chi(e: Ensemble, _reg: float = 0.0) -> float:
    """chi(E) = S(avg) - avg S; optional regularizer mixes in a bit of identity."""
    d = e.layout.total_dim
    eye = np.eye(d) / d
    avg = np.zeros((d, d), dtype=complex)
    mean_entropy = 0.0
    for p, rho in e.members:
        m = rho.matrix if _reg == 0.0 else (1.0 - _reg) * rho.matrix + _reg * eye
        avg += p * m
        if p > 0.0:
            mean_entropy += p * entropy_of_matrix(m)
    return entropy_of_matrix(avg) - mean_entropy


def chi_forward(e: Ensemble, _reg: float = 0.0) -> float:
    """Holevo information of the ensemble Bob holds (Alice's subsystems traced out)."""
    return holevo_chi(e.reduce_to_party(BOB), _reg)


def chi_backward(e: Ensemble, _reg: float = 0.0) -> float:
    return holevo_chi(e.reduce_to_party(ALICE), _reg)


def apply_to_ensemble(channel: TwoWayChannel, e: Ensemble,
                      act_on: tuple[str, str] = ("A", "B"),
                      validate: bool = True) -> Ensemble:
    """Act on each member individually, preserving its probability."""
    return Ensemble(
        tuple((p, apply(channel, rho, act_on, validate=validate)) for p, rho in e.members)
    )


def delta_chi_forward(channel: TwoWayChannel, e: Ensemble,
                      act_on: tuple[str, str] = ("A", "B"), _reg: float = 0.0) -> float:
    """chi_fwd(N E) - chi_fwd(E); may be negative for badly chosen ensembles."""
    ne = apply_to_ensemble(channel, e, act_on, validate=False)
    return chi_forward(ne, _reg) - chi_forward(e, _reg)


def delta_chi_backward(channel: TwoWayChannel, e: Ensemble,
                       act_on: tuple[str, str] = ("A", "B"), _reg: float = 0.0) -> float:
    ne = apply_to_ensemble(channel, e, act_on, validate=False)
    return chi_backward(ne, _reg) - chi_backward(e, _reg)


def delta_chi(channel: TwoWayChannel, e: Ensemble, direction: str,
              act_on: tuple[str, str] = ("A", "B"), _reg: float = 0.0) -> float:
    if direction == "forward":
        return delta_chi_forward(channel, e, act_on, _reg)
    if direction == "backward":
        return delta_chi_backward(channel, e, act_on, _reg)
    raise ValueError(f"unknown direction {direction!r}")


def tensor_ensembles(e1: Ensemble, e2: Ensemble) -> Ensemble:
    """All pairwise products: {p_i q_j, rho_i (x) sigma_j}."""
    members = []
    for p, rho in e1.members:
        for q, sigma in e2.members:
            members.append((p * q, tensor(rho, sigma)))
    return Ensemble(tuple(members))


def apply_local_unitary(e: Ensemble, u: np.ndarray, labels: Sequence[str]) -> Ensemble:
    """Conjugate every member by a unitary supported on the given subsystems."""
    from .states import permute_subsystems

    labels = list(labels)
    layout = e.layout
    rest = [l for l in layout.labels if l not in labels]
    d_u = int(np.prod([layout.dim(l) for l in labels]))
    if u.shape != (d_u, d_u):
        raise LayoutError(f"unitary shape {u.shape} != ({d_u}, {d_u})")
    members = []
    for p, rho in e.members:
        front = permute_subsystems(rho, labels + rest)
        d_rest = front.layout.total_dim // d_u
        big = np.kron(u, np.eye(d_rest))
        m = big @ front.matrix @ big.conj().T
        back = permute_subsystems(
            DensityOperator._trusted(m, front.layout), layout.labels
        )
        members.append((p, back))
    return Ensemble(tuple(members))


@dataclass(frozen=True, eq=False)
class MessageEnsemble:
    """Message-indexed ensemble: joint pmf p_ab plus one state per message pair.

    Flattening appends classical copy registers |a><a| on Alice's side and
    |b><b| on Bob's side, which is what makes chi_fwd = H(p_b) + chi_bar_fwd
    literally testable.
    """

    p_ab: np.ndarray
    states: tuple[tuple[DensityOperator, ...], ...]  # indexed [a][b], shared core layout
    alice_register: str = "Am"
    bob_register: str = "Bm"

    def __post_init__(self):
        p = np.array(self.p_ab, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p_ab", p)
        na, nb = p.shape
        if p.min() < 0.0:
            raise EnsembleError(f"negative message probability {p.min()}")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise EnsembleError(f"message pmf sums to 1 +/- {abs(p.sum() - 1.0):.3e}")
        if len(self.states) != na or any(len(row) != nb for row in self.states):
            raise EnsembleError("states must be indexed [a][b] matching p_ab")
        lay = self.states[0][0].layout
        for row in self.states:
            for rho in row:
                if rho.layout != lay:
                    raise EnsembleError("states do not share one core layout")
        if self.alice_register in lay.labels or self.bob_register in lay.labels:
            raise EnsembleError("message register labels collide with the core layout")

    @property
    def core_layout(self) -> SubsystemLayout:
        return self.states[0][0].layout

    @property
    def shape(self) -> tuple[int, int]:
        return self.p_ab.shape

    def marginal_a(self) -> np.ndarray:
        return self.p_ab.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.p_ab.sum(axis=0)

    def flatten(self) -> Ensemble:
        """Ensemble {p_ab, |a><a| (x) rho_ab (x) |b><b|} with real message registers."""
        na, nb = self.shape
        reg_a = SubsystemLayout.of((self.alice_register, na, ALICE))
        reg_b = SubsystemLayout.of((self.bob_register, nb, BOB))
        members = []
        for a in range(na):
            ma = np.zeros((na, na), dtype=complex)
            ma[a, a] = 1.0
            da = DensityOperator._trusted(ma, reg_a)
            for b in range(nb):
                mb = np.zeros((nb, nb), dtype=complex)
                mb[b, b] = 1.0
                db = DensityOperator._trusted(mb, reg_b)
                members.append((self.p_ab[a, b], tensor(tensor(da, self.states[a][b]), db)))
        return Ensemble(tuple(members))

    def conditional_forward(self, b: int) -> Ensemble:
        """E_b = {p(a|b), tr_{Alice's core systems} rho_ab} on Bob's core systems."""
        pb = self.p_ab[:, b].sum()
        if pb <= 0.0:
            raise EnsembleError(f"message b={b} has zero probability")
        keep = self.core_layout.party_labels(BOB)
        if not keep:
            raise LayoutError("core layout owns no Bob subsystems")
        from .states import partial_trace

        return Ensemble(
            tuple(
                (self.p_ab[a, b] / pb, partial_trace(self.states[a][b], keep))
                for a in range(self.shape[0])
            )
        )

    def conditional_backward(self, a: int) -> Ensemble:
        pa = self.p_ab[a, :].sum()
        if pa <= 0.0:
            raise EnsembleError(f"message a={a} has zero probability")
        keep = self.core_layout.party_labels(ALICE)
        if not keep:
            raise LayoutError("core layout owns no Alice subsystems")
        from .states import partial_trace

        return Ensemble(
            tuple(
                (self.p_ab[a, b] / pa, partial_trace(self.states[a][b], keep))
                for b in range(self.shape[1])
            )
        )

    def apply(self, channel: TwoWayChannel, act_on: tuple[str, str] = ("A", "B"),
              validate: bool = True) -> "MessageEnsemble":
        rows = []
        for a in range(self.shape[0]):
            rows.append(
                tuple(
                    apply(channel, self.states[a][b], act_on, validate=validate)
                    for b in range(self.shape[1])
                )
            )
        return MessageEnsemble(self.p_ab, tuple(rows), self.alice_register, self.bob_register)

    def apply_local_unitaries(self, u_alice: np.ndarray | None,
                              u_bob: np.ndarray | None) -> "MessageEnsemble":
        """Conjugate core states by party-local unitaries (full party subspaces)."""
        lay = self.core_layout
        rows = []
        for a in range(self.shape[0]):
            row = []
            for b in range(self.shape[1]):
                rho = self.states[a][b]
                for u, party in ((u_alice, ALICE), (u_bob, BOB)):
                    if u is None:
                        continue
                    dummy = Ensemble(((1.0, rho),))
                    rho = apply_local_unitary(dummy, u, lay.party_labels(party)).members[0][1]
                row.append(rho)
            rows.append(tuple(row))
        return MessageEnsemble(self.p_ab, tuple(rows), self.alice_register, self.bob_register)


def chi_bar_forward(me: MessageEnsemble) -> float:
    """Readjusted local Holevo information: sum_b p_b chi(E_b)."""
    out = 0.0
    for b in range(me.shape[1]):
        pb = me.p_ab[:, b].sum()
        if pb <= 0.0:
            continue
        out += pb * holevo_chi(me.conditional_forward(b))
    return out


def chi_bar_backward(me: MessageEnsemble) -> float:
    out = 0.0
    for a in range(me.shape[0]):
        pa = me.p_ab[a, :].sum()
        if pa <= 0.0:
            continue
        out += pa * holevo_chi(me.conditional_backward(a))
    return out


def delta_chi_bar_forward(channel: TwoWayChannel, me: MessageEnsemble,
                          act_on: tuple[str, str] = ("A", "B")) -> float:
    return chi_bar_forward(me.apply(channel, act_on, validate=False)) - chi_bar_forward(me)


def delta_chi_bar_backward(channel: TwoWayChannel, me: MessageEnsemble,
                           act_on: tuple[str, str] = ("A", "B")) -> float:
    return chi_bar_backward(me.apply(channel, act_on, validate=False)) - chi_bar_backward(me)
