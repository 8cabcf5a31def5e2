"""Seeded random generators for distributions, states and message matrices."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .core import ManyLetterSpace, ManyLetterVector, MessageMatrix


def as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_probs(k: int, seed=None, min_prob: float = 0.0) -> np.ndarray:
    """Dirichlet(1) sample of length ``k``; entries below ``min_prob`` are lifted."""
    p = as_rng(seed).dirichlet(np.ones(k))
    if min_prob > 0:
        p = np.maximum(p, min_prob)
        p /= p.sum()
    return p


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    rng = as_rng(seed)
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_letter_matrix(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix on ``d`` letters with the given rank (default full)."""
    rng = as_rng(seed)
    rank = d if rank is None else rank
    probs = random_probs(rank, rng)
    U = random_unitary(d, rng)[:, :rank]
    rho = (U * probs) @ U.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_vector(space: ManyLetterSpace, seed=None) -> ManyLetterVector:
    """Normalized complex Gaussian vector over the whole space."""
    rng = as_rng(seed)
    x = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return ManyLetterVector.from_array(space, x / np.linalg.norm(x), tol=0.0)


def random_message_matrix(space: ManyLetterSpace, rank: int, seed=None) -> MessageMatrix:
    """Random ``sigma`` of the given rank with eigenvectors spread over all sectors."""
    rng = as_rng(seed)
    if not 1 <= rank <= space.dim:
        raise ValueError(f"rank must lie in [1, {space.dim}]")
    A = rng.normal(size=(space.dim, rank)) + 1j * rng.normal(size=(space.dim, rank))
    Q, _ = np.linalg.qr(A)
    q = random_probs(rank, rng, min_prob=1e-3)
    M = (Q * q) @ Q.conj().T
    M = 0.5 * (M + M.conj().T)
    return MessageMatrix(space, sp.csr_matrix(M / np.trace(M).real))
