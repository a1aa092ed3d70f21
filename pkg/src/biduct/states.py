"""Labeled multipartite quantum states: layouts, density operators, entropies, distances.

All logarithms are base 2, so entropies are measured in bits.  Subsystem
order is explicit and never changed silently; use ``permute_subsystems`` to
reindex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ALICE = "alice"
BOB = "bob"

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
# Eigenvalues in [-EIG_NEG_TOL, EIG_ZERO_CLAMP] are treated as exact zeros for
# entropy purposes; anything below -EIG_NEG_TOL rejects the operator.
EIG_NEG_TOL = 1e-10
EIG_ZERO_CLAMP = 1e-12
PURE_NORM_TOL = 1e-12


class LayoutError(ValueError):
    """Bad subsystem bookkeeping: unknown/duplicate labels, dim mismatch."""


class StateValidationError(ValueError):
    """Matrix fails a density-operator invariant (Hermiticity, trace, PSD)."""


def _as_complex(m) -> np.ndarray:
    out = np.array(m, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered list of labeled subsystems with dimensions and party ownership."""

    labels: tuple[str, ...]
    dims: tuple[int, ...]
    parties: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.labels) == len(self.dims) == len(self.parties)):
            raise LayoutError("labels, dims and parties must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise LayoutError(f"duplicate labels in {self.labels}")
        if any(d < 1 for d in self.dims):
            raise LayoutError(f"dimensions must be >= 1, got {self.dims}")
        for p in self.parties:
            if p not in (ALICE, BOB):
                raise LayoutError(f"unknown party {p!r}")

    @staticmethod
    def of(*entries: tuple[str, int, str]) -> "SubsystemLayout":
        labels, dims, parties = zip(*entries) if entries else ((), (), ())
        return SubsystemLayout(tuple(labels), tuple(int(d) for d in dims), tuple(parties))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown label {label!r}; have {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.axis(label)]

    def party_labels(self, party: str) -> tuple[str, ...]:
        return tuple(l for l, p in zip(self.labels, self.parties) if p == party)

    def subset(self, labels: Iterable[str]) -> "SubsystemLayout":
        """Sub-layout of ``labels`` keeping this layout's order."""
        wanted = set(labels)
        for l in wanted:
            self.axis(l)
        keep = [i for i, l in enumerate(self.labels) if l in wanted]
        return SubsystemLayout(
            tuple(self.labels[i] for i in keep),
            tuple(self.dims[i] for i in keep),
            tuple(self.parties[i] for i in keep),
        )

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LayoutError(f"label collision: {sorted(clash)}")
        return SubsystemLayout(
            self.labels + other.labels, self.dims + other.dims, self.parties + other.parties
        )

    def with_dim(self, label: str, new_dim: int) -> "SubsystemLayout":
        i = self.axis(label)
        dims = list(self.dims)
        dims[i] = int(new_dim)
        return SubsystemLayout(self.labels, tuple(dims), self.parties)

    def reorder(self, new_order: Sequence[str]) -> "SubsystemLayout":
        if sorted(new_order) != sorted(self.labels):
            raise LayoutError(f"{tuple(new_order)} is not a permutation of {self.labels}")
        idx = [self.axis(l) for l in new_order]
        return SubsystemLayout(
            tuple(self.labels[i] for i in idx),
            tuple(self.dims[i] for i in idx),
            tuple(self.parties[i] for i in idx),
        )


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian PSD unit-trace matrix over an ordered list of labeled subsystems."""

    matrix: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_complex(self.matrix))
        m = self.matrix
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise StateValidationError(f"matrix shape {m.shape} != layout dim {d}")
        herm_dev = float(np.abs(m - m.conj().T).max())
        if herm_dev > HERMITIAN_TOL:
            raise StateValidationError(f"not Hermitian: max |M - M^dag| = {herm_dev:.3e}")
        tr_dev = abs(np.trace(m) - 1.0)
        if tr_dev > TRACE_TOL:
            raise StateValidationError(f"trace deviates from 1 by {tr_dev:.3e}")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lo < -EIG_NEG_TOL:
            raise StateValidationError(f"negative eigenvalue {lo:.3e}")

    @staticmethod
    def _trusted(matrix: np.ndarray, layout: SubsystemLayout) -> "DensityOperator":
        """Skip invariant checks for matrices that are valid by construction."""
        obj = object.__new__(DensityOperator)
        object.__setattr__(obj, "matrix", _as_complex(matrix))
        object.__setattr__(obj, "layout", layout)
        return obj

    @property
    def dim(self) -> int:
        return self.layout.total_dim


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over a layout; ``density()`` gives the rank-1 operator."""

    vector: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        object.__setattr__(self, "vector", _as_complex(self.vector).reshape(-1))
        if self.vector.shape != (self.layout.total_dim,):
            raise StateValidationError(
                f"vector length {self.vector.shape[0]} != layout dim {self.layout.total_dim}"
            )
        dev = abs(np.linalg.norm(self.vector) - 1.0)
        if dev > PURE_NORM_TOL:
            raise StateValidationError(f"norm deviates from 1 by {dev:.3e}")

    def density(self) -> DensityOperator:
        return DensityOperator._trusted(np.outer(self.vector, self.vector.conj()), self.layout)


def _tensorize(m: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    return m.reshape(tuple(dims) + tuple(dims))


def tensor(x: DensityOperator, y: DensityOperator) -> DensityOperator:
    """Kronecker product with concatenated layouts (labels must be disjoint)."""
    layout = x.layout.concat(y.layout)
    return DensityOperator._trusted(np.kron(x.matrix, y.matrix), layout)


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Reduce to the subsystems in ``keep`` (order preserved from the layout)."""
    keep = set(keep)
    if not keep:
        raise LayoutError("must keep at least one subsystem")
    for l in keep:
        rho.layout.axis(l)
    if keep == set(rho.layout.labels):
        return rho
    n = len(rho.layout.labels)
    t = _tensorize(rho.matrix, rho.layout.dims)
    removed = 0
    for i, label in enumerate(rho.layout.labels):
        if label in keep:
            continue
        ax = i - removed
        t = np.trace(t, axis1=ax, axis2=ax + (n - removed))
        removed += 1
    new_layout = rho.layout.subset(keep)
    d = new_layout.total_dim
    return DensityOperator._trusted(t.reshape(d, d), new_layout)


def permute_subsystems(rho: DensityOperator, new_order: Sequence[str]) -> DensityOperator:
    """Reindex subsystems into ``new_order`` (the only sanctioned reordering path)."""
    new_layout = rho.layout.reorder(new_order)
    if new_layout.labels == rho.layout.labels:
        return rho
    perm = [rho.layout.axis(l) for l in new_order]
    n = len(perm)
    t = _tensorize(rho.matrix, rho.layout.dims)
    t = t.transpose(perm + [p + n for p in perm])
    d = new_layout.total_dim
    return DensityOperator._trusted(t.reshape(d, d), new_layout)


def fuse_labels(rho: DensityOperator, labels: Sequence[str], new_label: str) -> DensityOperator:
    """Merge consecutive subsystems into one label (matrix is unchanged)."""
    idx = [rho.layout.axis(l) for l in labels]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise LayoutError(f"{tuple(labels)} are not consecutive in {rho.layout.labels}")
    parties = {rho.layout.parties[i] for i in idx}
    if len(parties) != 1:
        raise LayoutError("cannot fuse labels owned by different parties")
    lo = idx[0]
    fused_dim = int(np.prod([rho.layout.dims[i] for i in idx]))
    labels_out = rho.layout.labels[:lo] + (new_label,) + rho.layout.labels[lo + len(idx):]
    dims_out = rho.layout.dims[:lo] + (fused_dim,) + rho.layout.dims[lo + len(idx):]
    parties_out = rho.layout.parties[:lo] + (parties.pop(),) + rho.layout.parties[lo + len(idx):]
    return DensityOperator._trusted(rho.matrix, SubsystemLayout(labels_out, dims_out, parties_out))


def rename_labels(rho: DensityOperator, mapping: dict[str, str]) -> DensityOperator:
    labels = tuple(mapping.get(l, l) for l in rho.layout.labels)
    return DensityOperator._trusted(
        rho.matrix, SubsystemLayout(labels, rho.layout.dims, rho.layout.parties)
    )


def entropy_of_matrix(m: np.ndarray) -> float:
    """S = -sum lam log2 lam over the spectrum, with the zero clamp applied."""
    evals = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if evals.min() < -EIG_NEG_TOL:
        raise StateValidationError(f"negative eigenvalue {evals.min():.3e} in entropy input")
    lam = evals[evals > EIG_ZERO_CLAMP]
    if lam.size == 0:
        return 0.0
    return max(float(-(lam * np.log2(lam)).sum()), 0.0)


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Von Neumann entropy S(rho) = -tr(rho log2 rho), in bits."""
    return entropy_of_matrix(rho.matrix)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """D(rho, sigma) = (1/2) ||rho - sigma||_1, so orthogonal pure states are at 1."""
    if rho.layout != sigma.layout:
        raise LayoutError(f"layout mismatch: {rho.layout.labels} vs {sigma.layout.labels}")
    diff = rho.matrix - sigma.matrix
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.abs(evals).sum())


def shannon_entropy(p) -> float:
    """H(p) = -sum p log2 p with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size and p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min():.3e}")
    dev = abs(p.sum() - 1.0)
    if dev > TRACE_TOL:
        raise ValueError(f"probabilities sum to 1 +/- {dev:.3e}")
    pos = p[p > 0.0]
    return max(float(-(pos * np.log2(pos)).sum()), 0.0)


def basis_state(layout: SubsystemLayout, indices: Sequence[int]) -> PureState:
    """Computational basis vector |i1 i2 ...> for one index per subsystem."""
    if len(indices) != len(layout.labels):
        raise LayoutError("need one basis index per subsystem")
    vec = np.zeros(layout.total_dim, dtype=complex)
    flat = 0
    for i, d in zip(indices, layout.dims):
        if not 0 <= i < d:
            raise LayoutError(f"basis index {i} out of range for dim {d}")
        flat = flat * d + i
    vec[flat] = 1.0
    return PureState(vec, layout)


def maximally_mixed(layout: SubsystemLayout) -> DensityOperator:
    d = layout.total_dim
    return DensityOperator._trusted(np.eye(d, dtype=complex) / d, layout)


def epr_pair(label_a: str, label_b: str, dim: int = 2,
             parties: tuple[str, str] = (ALICE, BOB)) -> PureState:
    """Maximally entangled |Phi> = d^{-1/2} sum_x |x>|x> across two subsystems."""
    layout = SubsystemLayout.of((label_a, dim, parties[0]), (label_b, dim, parties[1]))
    vec = np.zeros(dim * dim, dtype=complex)
    for x in range(dim):
        vec[x * dim + x] = 1.0 / np.sqrt(dim)
    return PureState(vec, layout)
