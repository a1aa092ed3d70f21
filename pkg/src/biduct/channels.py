"""Two-way quantum channels in Kraus form, embeddings, and entanglement-breaking detection."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .states import DensityOperator, permute_subsystems

if TYPE_CHECKING:  # pragma: no cover
    from .classical import ClassicalTwoWayChannel

COMPLETENESS_TOL = 1e-9
CHOI_PSD_TOL = 1e-10
PPT_TOL = 1e-9


class ChannelValidationError(ValueError):
    """A CPTP invariant failed; the message carries the max deviation."""


class EBVerdict(enum.Enum):
    EB = "EB"
    NOT_EB = "NOT_EB"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ChannelDims:
    a_in: int
    b_in: int
    a_out: int
    b_out: int

    @property
    def in_dim(self) -> int:
        return self.a_in * self.b_in

    @property
    def out_dim(self) -> int:
        return self.a_out * self.b_out


def _completeness_deviation(kraus: Sequence[np.ndarray], d_in: int) -> float:
    s = sum(K.conj().T @ K for K in kraus)
    return float(np.abs(s - np.eye(d_in)).max())


@dataclass(frozen=True, eq=False)
class TwoWayChannel:
    """CPTP map on Alice_in (x) Bob_in -> Alice_out (x) Bob_out, stored as Kraus operators."""

    kraus: tuple[np.ndarray, ...]
    dims: ChannelDims
    # Set by embed_classical so downstream searches can reuse the defining pmf.
    classical_pmf: np.ndarray | None = field(default=None, compare=False, repr=False)
    _choi_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.kraus:
            raise ChannelValidationError("need at least one Kraus operator")
        ks = tuple(np.array(K, dtype=complex) for K in self.kraus)
        for K in ks:
            K.setflags(write=False)
            if K.shape != (self.dims.out_dim, self.dims.in_dim):
                raise ChannelValidationError(
                    f"Kraus shape {K.shape} != ({self.dims.out_dim}, {self.dims.in_dim})"
                )
        object.__setattr__(self, "kraus", ks)
        dev = _completeness_deviation(ks, self.dims.in_dim)
        if dev > COMPLETENESS_TOL:
            raise ChannelValidationError(f"sum K^dag K deviates from identity by {dev:.3e}")

    def choi(self) -> "ChoiMatrix":
        """Choi matrix on input (x) output, computed once and cached."""
        if "choi" not in self._choi_cache:
            self._choi_cache["choi"] = choi_of_kraus(self.kraus, self.dims.in_dim, self.dims.out_dim)
        return self._choi_cache["choi"]


@dataclass(frozen=True, eq=False)
class OneWayChannel:
    """CPTP map from Alice's input to Bob's output (Kraus of shape d_out x d_in)."""

    kraus: tuple[np.ndarray, ...]
    d_in: int
    d_out: int
    _choi_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.kraus:
            raise ChannelValidationError("need at least one Kraus operator")
        ks = tuple(np.array(K, dtype=complex) for K in self.kraus)
        for K in ks:
            K.setflags(write=False)
            if K.shape != (self.d_out, self.d_in):
                raise ChannelValidationError(f"Kraus shape {K.shape} != ({self.d_out}, {self.d_in})")
        object.__setattr__(self, "kraus", ks)
        dev = _completeness_deviation(ks, self.d_in)
        if dev > COMPLETENESS_TOL:
            raise ChannelValidationError(f"sum K^dag K deviates from identity by {dev:.3e}")

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        if "transfer" not in self._choi_cache:
            t = np.zeros((self.d_out * self.d_out, self.d_in * self.d_in), dtype=complex)
            for K in self.kraus:
                t += np.kron(K, K.conj())
            self._choi_cache["transfer"] = t
        out = self._choi_cache["transfer"] @ m.reshape(-1)
        return out.reshape(self.d_out, self.d_out)

    def choi(self) -> "ChoiMatrix":
        if "choi" not in self._choi_cache:
            self._choi_cache["choi"] = choi_of_kraus(self.kraus, self.d_in, self.d_out)
        return self._choi_cache["choi"]


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """J = sum_ij |i><j| (x) N(|i><j|); PSD iff the map is completely positive."""

    matrix: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        d = self.d_in * self.d_out
        if m.shape != (d, d):
            raise ChannelValidationError(f"Choi shape {m.shape} != ({d}, {d})")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lo < -CHOI_PSD_TOL:
            raise ChannelValidationError(f"Choi not PSD: min eigenvalue {lo:.3e}")
        t = m.reshape(self.d_in, self.d_out, self.d_in, self.d_out)
        reduced = np.trace(t, axis1=1, axis2=3)
        dev = float(np.abs(reduced - np.eye(self.d_in)).max())
        if dev > COMPLETENESS_TOL:
            raise ChannelValidationError(f"tr_out Choi deviates from identity by {dev:.3e}")

    def partial_transpose_out(self) -> np.ndarray:
        t = self.matrix.reshape(self.d_in, self.d_out, self.d_in, self.d_out)
        return t.transpose(0, 3, 2, 1).reshape(self.matrix.shape)


def choi_of_kraus(kraus: Sequence[np.ndarray], d_in: int, d_out: int) -> ChoiMatrix:
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for K in kraus:
        # vec over (input, output): column |i> (x) K|i>
        v = np.zeros((d_in, d_out), dtype=complex)
        block = np.empty((d_in, d_out), dtype=complex)
        for i in range(d_in):
            block[i] = K[:, i]
        vecK = block.reshape(-1)
        j += np.outer(vecK, vecK.conj())
    return ChoiMatrix(j, d_in, d_out)


def identity_channel(d_a: int, d_b: int) -> TwoWayChannel:
    d = d_a * d_b
    return TwoWayChannel((np.eye(d, dtype=complex),), ChannelDims(d_a, d_b, d_a, d_b))


def unitary_channel(u: np.ndarray, dims: ChannelDims) -> TwoWayChannel:
    return TwoWayChannel((np.array(u, dtype=complex),), dims)


def swap_channel(d: int = 2) -> TwoWayChannel:
    """Exchange Alice's and Bob's inputs (both of dimension d)."""
    u = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            u[j * d + i, i * d + j] = 1.0
    return unitary_channel(u, ChannelDims(d, d, d, d))


def depolarizing_channel(dims: ChannelDims) -> TwoWayChannel:
    """Completely depolarizing: every input goes to the maximally mixed output."""
    kraus = []
    scale = 1.0 / np.sqrt(dims.out_dim)
    for o in range(dims.out_dim):
        for i in range(dims.in_dim):
            K = np.zeros((dims.out_dim, dims.in_dim), dtype=complex)
            K[o, i] = scale
            kraus.append(K)
    return TwoWayChannel(tuple(kraus), dims)


def one_way_identity(d: int) -> OneWayChannel:
    return OneWayChannel((np.eye(d, dtype=complex),), d, d)


def one_way_depolarizing(d: int) -> OneWayChannel:
    kraus = []
    for o in range(d):
        for i in range(d):
            K = np.zeros((d, d), dtype=complex)
            K[o, i] = 1.0 / np.sqrt(d)
            kraus.append(K)
    return OneWayChannel(tuple(kraus), d, d)


def measure_reprepare_basis(d: int = 2) -> OneWayChannel:
    """Measure in the computational basis and reprepare the outcome state."""
    return OneWayChannel(
        tuple(np.outer(_basis(d, i), _basis(d, i).conj()) for i in range(d)), d, d
    )


def dephasing_channel(d: int = 2) -> OneWayChannel:
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return OneWayChannel(
        (np.eye(d, dtype=complex) / np.sqrt(2), z / np.sqrt(2)), d, d
    )


def _basis(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def apply(channel: TwoWayChannel, rho: DensityOperator,
          act_on: tuple[str, str] = ("A", "B"), validate: bool = True) -> DensityOperator:
    """Apply the channel to two labeled subsystems; all other labels are spectators.

    The output layout keeps the label order of the input, with the acted-on
    labels taking the channel's output dimensions.
    """
    label_a, label_b = act_on
    layout = rho.layout
    if layout.dim(label_a) != channel.dims.a_in or layout.dim(label_b) != channel.dims.b_in:
        raise ChannelValidationError(
            f"input dims ({layout.dim(label_a)}, {layout.dim(label_b)}) != "
            f"({channel.dims.a_in}, {channel.dims.b_in})"
        )
    spectators = [l for l in layout.labels if l not in (label_a, label_b)]
    front = permute_subsystems(rho, [label_a, label_b] + spectators)
    d_act_in = channel.dims.in_dim
    d_spec = front.layout.total_dim // d_act_in
    t = front.matrix.reshape(d_act_in, d_spec, d_act_in, d_spec)
    d_act_out = channel.dims.out_dim
    out = np.zeros((d_act_out, d_spec, d_act_out, d_spec), dtype=complex)
    for K in channel.kraus:
        out += np.einsum("ia,asbt,jb->isjt", K, t, K.conj(), optimize=True)
    out_layout = (
        front.layout.with_dim(label_a, channel.dims.a_out).with_dim(label_b, channel.dims.b_out)
    )
    d_total = out_layout.total_dim
    result = DensityOperator._trusted(out.reshape(d_total, d_total), out_layout)
    result = permute_subsystems(result, layout.labels)
    if validate:
        result = DensityOperator(result.matrix, result.layout)
    return result


def tensor_channels(n1: TwoWayChannel, n2: TwoWayChannel) -> TwoWayChannel:
    """Parallel composition; composite Alice input is A1 A2, composite Bob input B1 B2."""
    d = ChannelDims(
        n1.dims.a_in * n2.dims.a_in, n1.dims.b_in * n2.dims.b_in,
        n1.dims.a_out * n2.dims.a_out, n1.dims.b_out * n2.dims.b_out,
    )
    kraus = []
    for K1 in n1.kraus:
        for K2 in n2.kraus:
            K = np.kron(K1, K2)
            # kron index order is (A1 B1 A2 B2); regroup as (A1 A2 B1 B2).
            t = K.reshape(
                n1.dims.a_out, n1.dims.b_out, n2.dims.a_out, n2.dims.b_out,
                n1.dims.a_in, n1.dims.b_in, n2.dims.a_in, n2.dims.b_in,
            )
            t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
            kraus.append(t.reshape(d.out_dim, d.in_dim))
    if len(kraus) > d.in_dim * d.out_dim:
        kraus = list(compress_kraus(kraus, d.in_dim, d.out_dim))
    return TwoWayChannel(tuple(kraus), d)


def embed_one_way(m: OneWayChannel) -> TwoWayChannel:
    """View a one-way channel as a two-way channel with trivial Bob input / Alice output."""
    dims = ChannelDims(a_in=m.d_in, b_in=1, a_out=1, b_out=m.d_out)
    return TwoWayChannel(m.kraus, dims)


def embed_classical(w: "ClassicalTwoWayChannel") -> TwoWayChannel:
    """Kraus set {sqrt(p(a'b'|ab)) |a'b'><ab|} of a classical two-way channel."""
    na, nb, na_o, nb_o = w.pmf.shape
    dims = ChannelDims(na, nb, na_o, nb_o)
    kraus = []
    for a in range(na):
        for b in range(nb):
            for ao in range(na_o):
                for bo in range(nb_o):
                    p = w.pmf[a, b, ao, bo]
                    if p <= 0.0:
                        continue
                    K = np.zeros((dims.out_dim, dims.in_dim), dtype=complex)
                    K[ao * nb_o + bo, a * nb + b] = np.sqrt(p)
                    kraus.append(K)
    return TwoWayChannel(tuple(kraus), dims, classical_pmf=w.pmf.copy())


def compress_kraus(kraus: Sequence[np.ndarray], d_in: int, d_out: int) -> tuple[np.ndarray, ...]:
    """Minimal Kraus set (<= d_in * d_out) from the Choi eigendecomposition."""
    j = choi_of_kraus(kraus, d_in, d_out).matrix
    evals, vecs = np.linalg.eigh((j + j.conj().T) / 2)
    out = []
    for lam, v in zip(evals, vecs.T):
        if lam < 1e-14:
            continue
        out.append(np.sqrt(lam) * v.reshape(d_in, d_out).T)
    return tuple(out)


def tensor_one_way(m1: OneWayChannel, m2: OneWayChannel) -> OneWayChannel:
    kraus = tuple(np.kron(K1, K2) for K1 in m1.kraus for K2 in m2.kraus)
    d_in, d_out = m1.d_in * m2.d_in, m1.d_out * m2.d_out
    if len(kraus) > d_in * d_out:
        kraus = compress_kraus(kraus, d_in, d_out)
    return OneWayChannel(kraus, d_in, d_out)


def is_entanglement_breaking(m: OneWayChannel) -> EBVerdict:
    """PPT test on the Choi matrix; exact iff d_in * d_out <= 6 (Horodecki regime)."""
    pt = m.choi().partial_transpose_out()
    lo = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2).min())
    if lo < -PPT_TOL:
        return EBVerdict.NOT_EB
    if m.d_in * m.d_out <= 6:
        return EBVerdict.EB
    return EBVerdict.INCONCLUSIVE


def effective_one_way(channel: TwoWayChannel, partner_state: np.ndarray,
                      direction: str = "forward") -> OneWayChannel:
    """One-way channel induced by fixing the partner's input and discarding the sender's output.

    Forward: Alice's input -> Bob's output with Bob's input clamped to
    ``partner_state``; backward is the mirror image.
    """
    dims = channel.dims
    if direction == "forward":
        d_in, d_fix = dims.a_in, dims.b_in
        d_keep, d_drop = dims.b_out, dims.a_out
    elif direction == "backward":
        d_in, d_fix = dims.b_in, dims.a_in
        d_keep, d_drop = dims.a_out, dims.b_out
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if partner_state.shape != (d_fix, d_fix):
        raise ChannelValidationError(
            f"partner state shape {partner_state.shape} != ({d_fix}, {d_fix})"
        )
    mu, v = np.linalg.eigh((partner_state + partner_state.conj().T) / 2)
    kraus_out = []
    for K in channel.kraus:
        t = K.reshape(dims.a_out, dims.b_out, dims.a_in, dims.b_in)
        for j in range(d_fix):
            if mu[j] < 1e-14:
                continue
            if direction == "forward":
                # Contract Bob's input with sqrt(mu) v_j, then peel off Alice's output.
                kj = np.einsum("xyab,b->xya", t, np.sqrt(mu[j]) * v[:, j])
                for alpha in range(d_drop):
                    kraus_out.append(kj[alpha])
            else:
                kj = np.einsum("xyab,a->xyb", t, np.sqrt(mu[j]) * v[:, j])
                for beta in range(d_drop):
                    kraus_out.append(kj[:, beta, :])
    return OneWayChannel(tuple(kraus_out), d_in, d_keep)
