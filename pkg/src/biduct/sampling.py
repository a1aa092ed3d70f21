"""Seeded random generators for states, unitaries, channels and distributions."""

from __future__ import annotations

import numpy as np

from .states import DensityOperator, SubsystemLayout


def rng_from(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for a (seed, stream...) coordinate; order-insensitive use."""
    return np.random.default_rng([int(seed)] + [int(s) for s in stream])


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_pure_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = ginibre(rng, dim, 1).reshape(-1)
    return v / np.linalg.norm(v)


def random_density_matrix(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng, dim, rank or dim)
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_density(rng: np.random.Generator, layout: SubsystemLayout,
                   rank: int | None = None) -> DensityOperator:
    return DensityOperator._trusted(random_density_matrix(rng, layout.total_dim, rank), layout)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus_set(rng: np.random.Generator, d_in: int, d_out: int, k: int) -> list[np.ndarray]:
    """k random Kraus operators normalized to sum_i K_i^dag K_i = I."""
    raw = [ginibre(rng, d_out, d_in) for _ in range(k)]
    s = sum(K.conj().T @ K for K in raw)
    evals, vecs = np.linalg.eigh(s)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(evals)) @ vecs.conj().T
    return [K @ inv_sqrt for K in raw]


def random_probability_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    p = rng.dirichlet(np.ones(n))
    return p / p.sum()


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int) -> list[np.ndarray]:
    """POVM from Haar-random vectors: F_k = S^{-1/2} v_k v_k^dag S^{-1/2}."""
    raw = []
    for _ in range(n_outcomes):
        v = random_pure_vector(rng, dim)
        raw.append(np.outer(v, v.conj()))
    s = sum(raw)
    evals, vecs = np.linalg.eigh(s)
    if evals.min() < 1e-12:
        # Degenerate draw; pad with a bit of identity to keep S invertible.
        s = s + 1e-6 * np.eye(dim)
        raw = [g + 1e-6 * np.eye(dim) / n_outcomes for g in raw]
        evals, vecs = np.linalg.eigh(s)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(evals)) @ vecs.conj().T
    return [inv_sqrt @ g @ inv_sqrt for g in raw]


def measure_prepare_kraus(povm: list[np.ndarray], outputs: list[np.ndarray]) -> list[np.ndarray]:
    """Kraus set of rho -> sum_k tr(F_k rho) sigma_k (entanglement-breaking by construction)."""
    kraus = []
    for f, sigma in zip(povm, outputs):
        nu, w = np.linalg.eigh(f)
        mu, u = np.linalg.eigh(sigma)
        for m in range(len(nu)):
            if nu[m] < 1e-14:
                continue
            for l in range(len(mu)):
                if mu[l] < 1e-14:
                    continue
                kraus.append(np.sqrt(mu[l] * nu[m]) * np.outer(u[:, l], w[:, m].conj()))
    return kraus


def random_measure_prepare(rng: np.random.Generator, d_in: int, d_out: int,
                           n_outcomes: int | None = None) -> list[np.ndarray]:
    n = n_outcomes or d_in * d_in
    povm = random_povm(rng, d_in, n)
    outputs = [random_density_matrix(rng, d_out) for _ in range(n)]
    return measure_prepare_kraus(povm, outputs)


def random_conditional_pmf(rng: np.random.Generator, na: int, nb: int,
                           na_out: int, nb_out: int) -> np.ndarray:
    """p(a', b' | a, b) as an array indexed [a, b, a', b'] with unit row sums."""
    pmf = np.empty((na, nb, na_out, nb_out))
    for a in range(na):
        for b in range(nb):
            pmf[a, b] = rng.dirichlet(np.ones(na_out * nb_out)).reshape(na_out, nb_out)
    return pmf
