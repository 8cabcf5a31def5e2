"""Variable-length quantum messages.

A truncated many-letter space is the direct sum of the block spaces
``H^n`` for a finite set of lengths ``n``. Basis strings are tuples of
basis-letter indices; the empty tuple is the empty message. All vectors are
stored in basis-letter coordinates.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .exceptions import (
    AlphabetMismatchError,
    InvariantError,
    NormalizationError,
    TruncationError,
)

#: Eigenvalues at or below this are treated as zero (0 log 0 = 0).
EIGEN_CUTOFF = 1e-12
#: Tolerance on norms, traces and probability sums.
NORM_TOL = 1e-12
#: Rank cutoff on the Gram spectrum when orthonormalizing an alphabet.
RANK_CUTOFF = 1e-10
#: Hard cap on the dimension of any truncated space we index.
MAX_SPACE_DIM = 1 << 22

BasisString = tuple


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate ``vec`` so its largest-magnitude entry is real and positive."""
    if vec.size == 0:
        return vec
    k = int(np.argmax(np.abs(vec) > np.abs(vec).max() - 1e-12))
    if abs(vec[k]) == 0:
        return vec
    return vec * (abs(vec[k]) / vec[k])


def _as_complex_vector(coords) -> np.ndarray:
    arr = np.asarray(coords)
    return arr.astype(complex).ravel()


@dataclass(frozen=True)
class TruncationConfig:
    """Global maximum string length for sums, spaces and operator checks."""

    max_length: int

    def __post_init__(self):
        if int(self.max_length) != self.max_length or self.max_length < 0:
            raise ValueError(f"max_length must be a nonnegative integer, got {self.max_length!r}")

    def check(self, length: int) -> None:
        if length > self.max_length:
            raise TruncationError(
                f"string length {length} exceeds the truncation L_max={self.max_length}"
            )


class QuantumAlphabet:
    """A set of normalized letter states and the basis letters they span.

    Parameters
    ----------
    letters : array_like, shape (k, D)
        Letter states, one per row, in an orthonormal reference basis.
    rank_cutoff : float
        Gram eigenvalues at or below this are dropped when building the
        basis letters.

    Attributes
    ----------
    basis : ndarray, shape (D, basis_dim)
        Orthonormal basis letters as columns (reference coordinates).
    letter_coordinates : ndarray, shape (k, basis_dim)
        The letters expressed in basis-letter coordinates.
    """

    def __init__(self, letters, rank_cutoff: float = RANK_CUTOFF):
        letters = np.atleast_2d(np.asarray(letters, dtype=complex))
        if letters.size == 0:
            raise ValueError("an alphabet needs at least one letter")
        norms = np.linalg.norm(letters, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise NormalizationError(f"letters must have unit norm, got norms {norms}")
        self.letters = letters
        gram = letters.conj() @ letters.T
        self.gram = gram
        if np.allclose(gram, np.eye(len(letters)), atol=NORM_TOL):
            # already orthonormal: the letters are their own basis
            basis = letters.T.copy()
        else:
            w, v = np.linalg.eigh(gram)
            order = np.argsort(-w, kind="stable")
            w, v = w[order], v[:, order]
            keep = w > rank_cutoff
            basis = letters.T @ v[:, keep] / np.sqrt(w[keep])
            basis = np.column_stack([_fix_phase(b) for b in basis.T])
        self.basis = basis
        self.letter_coordinates = (basis.conj().T @ letters.T).T

    @classmethod
    def standard(cls, dim: int) -> "QuantumAlphabet":
        """Alphabet of ``dim`` orthonormal reference letters."""
        return cls(np.eye(dim))

    @property
    def basis_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def size(self) -> int:
        return self.letters.shape[0]

    def letter(self, i: int) -> np.ndarray:
        return self.letter_coordinates[i]

    def string(self, letter_indices: Sequence[int]) -> "ManyLetterVector":
        """Product vector ``|x_1> ⊗ ... ⊗ |x_n>`` of letters (by index)."""
        vec = ManyLetterVector.empty(self.basis_dim)
        for i in letter_indices:
            vec = tensor_concat(vec, ManyLetterVector.from_letter(self.letter(i)))
        return vec

    def __repr__(self):
        return f"QuantumAlphabet(size={self.size}, basis_dim={self.basis_dim})"


@dataclass(frozen=True)
class ManyLetterSpace:
    """Index bookkeeping for a truncated many-letter space.

    Basis strings are ordered by length, then lexicographically; the index of
    a string within its sector is its base-``basis_dim`` value.
    """

    basis_dim: int
    lengths: tuple
    _offsets: tuple = field(init=False, repr=False, compare=False)
    dim: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.basis_dim < 1:
            raise ValueError("basis_dim must be at least 1")
        lengths = tuple(sorted({int(n) for n in self.lengths}))
        if not lengths or lengths[0] < 0:
            raise ValueError(f"invalid sector lengths {self.lengths!r}")
        offsets, total = [], 0
        for n in lengths:
            offsets.append(total)
            total += self.basis_dim**n
            if total > MAX_SPACE_DIM:
                raise TruncationError(
                    f"truncated space of dimension > {MAX_SPACE_DIM} "
                    f"(basis_dim={self.basis_dim}, lengths up to {n})"
                )
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "_offsets", tuple(offsets))
        object.__setattr__(self, "dim", total)

    @classmethod
    def truncated(cls, basis_dim: int, max_length: int) -> "ManyLetterSpace":
        return cls(basis_dim, tuple(range(max_length + 1)))

    @classmethod
    def block(cls, basis_dim: int, length: int) -> "ManyLetterSpace":
        return cls(basis_dim, (length,))

    @property
    def max_length(self) -> int:
        return self.lengths[-1]

    def sector_dim(self, n: int) -> int:
        return self.basis_dim**n

    def offset(self, n: int) -> int:
        try:
            return self._offsets[self.lengths.index(n)]
        except ValueError:
            raise TruncationError(f"length {n} is not a sector of {self}") from None

    def sector_slice(self, n: int) -> slice:
        start = self.offset(n)
        return slice(start, start + self.sector_dim(n))

    def __contains__(self, n: int) -> bool:
        return n in self.lengths

    def index(self, key: Sequence[int]) -> int:
        local = 0
        for a in key:
            if not 0 <= a < self.basis_dim:
                raise ValueError(f"letter index {a} out of range for basis_dim {self.basis_dim}")
            local = local * self.basis_dim + a
        return self.offset(len(key)) + local

    def key(self, index: int) -> BasisString:
        pos = bisect.bisect_right(self._offsets, index) - 1
        if pos < 0 or index >= self.dim:
            raise IndexError(index)
        n = self.lengths[pos]
        local = index - self._offsets[pos]
        digits = []
        for _ in range(n):
            local, r = divmod(local, self.basis_dim)
            digits.append(r)
        return tuple(reversed(digits))

    def keys(self) -> Iterator[BasisString]:
        for n in self.lengths:
            yield from itertools.product(range(self.basis_dim), repeat=n)

    def length_diagonal(self) -> np.ndarray:
        """Diagonal of the length operator in this space's index order."""
        return np.repeat(
            np.array(self.lengths, dtype=float),
            [self.sector_dim(n) for n in self.lengths],
        )

    def sector_of(self) -> np.ndarray:
        return self.length_diagonal().astype(int)

    def reindex(self, arr: np.ndarray, target: "ManyLetterSpace") -> np.ndarray:
        """Copy a vector over this space into ``target`` (shared sectors only)."""
        if target.basis_dim != self.basis_dim:
            raise AlphabetMismatchError("spaces have different basis dimensions")
        out = np.zeros(target.dim, dtype=complex)
        for n in self.lengths:
            sl = self.sector_slice(n)
            if n in target:
                out[target.sector_slice(n)] = arr[sl]
            elif np.any(arr[sl] != 0):
                raise TruncationError(f"sector {n} is not part of the target space")
        return out


class ManyLetterVector:
    """Sparse superposition of basis strings of possibly different lengths.

    Parameters
    ----------
    amplitudes : mapping
        Basis string (tuple of letter indices) to complex amplitude.
    basis_dim : int
        Dimension of the letter space the strings are built from.
    """

    __slots__ = ("amplitudes", "basis_dim")

    def __init__(self, amplitudes: Mapping[Sequence[int], complex], basis_dim: int):
        amps = {}
        for key, value in amplitudes.items():
            key = tuple(int(a) for a in key)
            if any(not 0 <= a < basis_dim for a in key):
                raise ValueError(f"basis string {key} out of range for basis_dim {basis_dim}")
            value = complex(value)
            if value != 0:
                amps[key] = amps.get(key, 0j) + value
        self.amplitudes = amps
        self.basis_dim = int(basis_dim)

    @classmethod
    def empty(cls, basis_dim: int) -> "ManyLetterVector":
        """The normalized empty message ``|·>``."""
        return cls({(): 1.0}, basis_dim)

    @classmethod
    def basis(cls, key: Sequence[int], basis_dim: int) -> "ManyLetterVector":
        return cls({tuple(key): 1.0}, basis_dim)

    @classmethod
    def from_letter(cls, coords) -> "ManyLetterVector":
        coords = _as_complex_vector(coords)
        return cls({(a,): c for a, c in enumerate(coords)}, len(coords))

    @classmethod
    def from_array(cls, space: ManyLetterSpace, arr, tol: float = 0.0) -> "ManyLetterVector":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (space.dim,):
            raise ValueError(f"expected an array of length {space.dim}, got {arr.shape}")
        nz = np.flatnonzero(np.abs(arr) > tol)
        return cls({space.key(int(i)): arr[i] for i in nz}, space.basis_dim)

    def to_array(self, space: ManyLetterSpace) -> np.ndarray:
        if space.basis_dim != self.basis_dim:
            raise AlphabetMismatchError(
                f"vector has basis_dim {self.basis_dim}, space has {space.basis_dim}"
            )
        out = np.zeros(space.dim, dtype=complex)
        for key, value in self.amplitudes.items():
            out[space.index(key)] = value
        return out

    @property
    def lengths(self) -> list:
        return sorted({len(k) for k in self.amplitudes})

    @property
    def max_length(self) -> int:
        return max((len(k) for k in self.amplitudes), default=0)

    def sector_norms(self) -> dict:
        """Squared norm of each length component."""
        out: dict = {}
        for key, value in self.amplitudes.items():
            out[len(key)] = out.get(len(key), 0.0) + abs(value) ** 2
        return dict(sorted(out.items()))

    def sector(self, n: int) -> "ManyLetterVector":
        return ManyLetterVector(
            {k: v for k, v in self.amplitudes.items() if len(k) == n}, self.basis_dim
        )

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.amplitudes.values()))

    def normalized(self) -> "ManyLetterVector":
        nrm = self.norm()
        if nrm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return self * (1.0 / nrm)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def _check_compatible(self, other: "ManyLetterVector") -> None:
        if other.basis_dim != self.basis_dim:
            raise AlphabetMismatchError(
                f"basis_dim mismatch: {self.basis_dim} vs {other.basis_dim}"
            )

    def __add__(self, other: "ManyLetterVector") -> "ManyLetterVector":
        self._check_compatible(other)
        amps = dict(self.amplitudes)
        for k, v in other.amplitudes.items():
            amps[k] = amps.get(k, 0j) + v
        return ManyLetterVector(amps, self.basis_dim)

    def __sub__(self, other: "ManyLetterVector") -> "ManyLetterVector":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "ManyLetterVector":
        return ManyLetterVector(
            {k: v * scalar for k, v in self.amplitudes.items()}, self.basis_dim
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def allclose(self, other: "ManyLetterVector", atol: float = 1e-10) -> bool:
        return (self - other).norm() <= atol

    def __repr__(self):
        def fmt(key):
            return "|" + ("".join(map(str, key)) if key else "·") + ">"

        terms = ", ".join(f"{v:.4g}{fmt(k)}" for k, v in sorted(
            self.amplitudes.items(), key=lambda kv: (len(kv[0]), kv[0])))
        return f"ManyLetterVector({terms or '0'}; basis_dim={self.basis_dim})"


def inner_product(u: ManyLetterVector, v: ManyLetterVector) -> complex:
    """``<u|v>``, conjugate-linear in ``u``."""
    u._check_compatible(v)
    small, large = (u, v) if len(u.amplitudes) <= len(v.amplitudes) else (v, u)
    total = 0j
    for key in small.amplitudes:
        if key in large.amplitudes:
            total += np.conj(u.amplitudes[key]) * v.amplitudes[key]
    return complex(total)


def tensor_concat(
    u: ManyLetterVector, v: ManyLetterVector, config: TruncationConfig | None = None
) -> ManyLetterVector:
    """Bilinear extension of string concatenation, ``u ⊗ v``."""
    u._check_compatible(v)
    amps: dict = {}
    for ku, au in u.amplitudes.items():
        for kv, av in v.amplitudes.items():
            key = ku + kv
            if config is not None:
                config.check(len(key))
            amps[key] = amps.get(key, 0j) + au * av
    return ManyLetterVector(amps, u.basis_dim)


def length_expectation(v: ManyLetterVector) -> float:
    """``<v|L|v>`` for the length operator ``L = sum_n n Pi_n``."""
    if not v.is_normalized():
        raise NormalizationError(f"vector has norm {v.norm():.15g}, expected 1")
    return float(sum(n * w for n, w in v.sector_norms().items()))


class MessageEnsemble:
    """Weighted pure many-letter messages ``{(p, |phi>)}``."""

    def __init__(self, members: Iterable[tuple]):
        members = [(float(p), vec) for p, vec in members]
        if not members:
            raise ValueError("an ensemble needs at least one member")
        dims = {vec.basis_dim for _, vec in members}
        if len(dims) != 1:
            raise AlphabetMismatchError(f"members use different basis dimensions {dims}")
        if any(p <= 0 for p, _ in members):
            raise InvariantError("ensemble probabilities must be strictly positive")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise InvariantError(f"ensemble probabilities sum to {total!r}, expected 1")
        for p, vec in members:
            if not vec.is_normalized():
                raise NormalizationError(f"member with p={p} has norm {vec.norm():.15g}")
        self.members = members
        self.basis_dim = dims.pop()

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def max_length(self) -> int:
        return max(vec.max_length for _, vec in self.members)

    def to_matrix(self, space: ManyLetterSpace | None = None) -> "MessageMatrix":
        return ensemble_to_matrix(self, space=space)


class MessageMatrix:
    """Density operator on a truncated many-letter space.

    The operator is held as one sparse matrix over ``space``; length sectors
    are views into it. Sector-diagonal inputs (canonical and grand canonical
    messages) stay block diagonal, cross-sector coherences are kept only when
    present.
    """

    def __init__(self, space: ManyLetterSpace, matrix, validate: bool = True):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match space dim {space.dim}")
        matrix.eliminate_zeros()
        self.space = space
        self.matrix = matrix
        if validate:
            self.validate()

    @property
    def basis_dim(self) -> int:
        return self.space.basis_dim

    def trace(self) -> float:
        return float(np.real(self.matrix.diagonal().sum()))

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def sector_block(self, n: int) -> np.ndarray:
        sl = self.space.sector_slice(n)
        return self.matrix[sl, sl].toarray()

    def cross_block(self, n: int, m: int) -> np.ndarray:
        return self.matrix[self.space.sector_slice(n), self.space.sector_slice(m)].toarray()

    def sector_weights(self) -> dict:
        """Trace of each length sector, i.e. the length distribution."""
        diag = np.real(self.matrix.diagonal())
        return {n: float(diag[self.space.sector_slice(n)].sum()) for n in self.space.lengths}

    def is_block_diagonal(self, tol: float = 0.0) -> bool:
        coo = self.matrix.tocoo()
        sectors = self.space.sector_of()
        off = sectors[coo.row] != sectors[coo.col]
        return not np.any(np.abs(coo.data[off]) > tol)

    def expectation(self, diagonal_observable: np.ndarray) -> float:
        """``Tr{sigma A}`` for an observable diagonal in the string basis."""
        return float(np.real(self.matrix.diagonal() @ diagonal_observable))

    def expectation_operator(self, observable) -> float:
        """``Tr{sigma A}`` for a general (sparse or dense) observable."""
        if sp.issparse(observable):
            return float(np.real(self.matrix.multiply(observable.T).sum()))
        return float(np.real(np.sum(self.matrix.toarray() * np.asarray(observable).T)))

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def components(self):
        """Connected components of the sparsity graph, as index arrays."""
        if self.matrix.nnz == 0:
            return []
        pattern = (self.matrix != 0).astype(np.int8)
        pattern = pattern + pattern.T
        ncomp, labels = connected_components(pattern, directed=False)
        used = np.zeros(self.space.dim, dtype=bool)
        used[np.unique(np.concatenate([pattern.tocoo().row, pattern.tocoo().col]))] = True
        groups: dict = {}
        for idx in np.flatnonzero(used):
            groups.setdefault(labels[idx], []).append(idx)
        return [np.asarray(g) for _, g in sorted(groups.items(), key=lambda kv: kv[1][0])]

    def eigh(self):
        """Full spectrum, as ``(eigenvalues, eigenvectors)`` over the space.

        Eigenvectors are returned as a list of ``(indices, coefficients)``
        pairs since they are confined to connected components.
        """
        values, vectors = [], []
        for comp in self.components():
            block = self.matrix[comp][:, comp].toarray()
            block = 0.5 * (block + block.conj().T)
            w, v = np.linalg.eigh(block)
            for j in range(len(w)):
                values.append(float(w[j]))
                vectors.append((comp, _fix_phase(v[:, j])))
        return np.asarray(values), vectors

    def eigenvalues(self) -> np.ndarray:
        return self.eigh()[0]

    def validate(self, tol: float = NORM_TOL) -> None:
        herm = self.hermiticity_error()
        if herm > tol:
            raise InvariantError(f"message matrix is not Hermitian (max deviation {herm:.3g})")
        tr = self.trace()
        if abs(tr - 1.0) > tol:
            raise InvariantError(f"message matrix has trace {tr!r}, expected 1")
        w = self.eigenvalues()
        if w.size and w.min() < -tol:
            raise InvariantError(f"message matrix has negative eigenvalue {w.min():.3g}")

    def __repr__(self):
        return f"MessageMatrix(sectors={self.space.lengths}, nnz={self.matrix.nnz})"


def ensemble_to_matrix(
    ensemble: MessageEnsemble,
    space: ManyLetterSpace | None = None,
    config: TruncationConfig | None = None,
) -> MessageMatrix:
    """``sigma = sum_phi p(phi) |phi><phi|``."""
    if space is None:
        max_len = ensemble.max_length
        if config is not None:
            config.check(max_len)
            max_len = config.max_length
        space = ManyLetterSpace.truncated(ensemble.basis_dim, max_len)
    rows, cols, data = [], [], []
    for p, vec in ensemble.members:
        idx = np.array([space.index(k) for k in vec.amplitudes], dtype=np.int64)
        amp = np.array(list(vec.amplitudes.values()), dtype=complex)
        rows.append(np.repeat(idx, len(idx)))
        cols.append(np.tile(idx, len(idx)))
        data.append(p * np.outer(amp, amp.conj()).ravel())
    mat = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.dim, space.dim),
    ).tocsr()
    return MessageMatrix(space, mat)


def tensor_power(rho: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, rho)
    return out


def _check_letter_matrix(rho) -> np.ndarray:
    rho = np.atleast_2d(np.asarray(rho, dtype=complex))
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"letter matrix must be square, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > NORM_TOL:
        raise InvariantError("letter matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > NORM_TOL:
        raise InvariantError(f"letter matrix has trace {np.trace(rho).real!r}")
    if np.linalg.eigvalsh(rho).min() < -NORM_TOL:
        raise InvariantError("letter matrix is not positive semidefinite")
    return rho


def grand_canonical(
    lambdas: Sequence[float],
    rho,
    config: TruncationConfig | None = None,
) -> MessageMatrix:
    """``sigma = sum_n lambda_n rho^{⊗n}``, block diagonal over lengths.

    ``lambdas[n]`` is the weight of length ``n``; trailing entries may be 0.
    """
    rho = _check_letter_matrix(rho)
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas < 0) or abs(lambdas.sum() - 1.0) > NORM_TOL:
        raise InvariantError(f"length distribution must be a probability vector, got {lambdas}")
    support = np.flatnonzero(lambdas > 0)
    top = int(support.max())
    if config is not None:
        config.check(top)
        top = config.max_length
    space = ManyLetterSpace.truncated(rho.shape[0], top)
    blocks = []
    for n in space.lengths:
        lam = lambdas[n] if n < len(lambdas) else 0.0
        if lam > 0:
            blocks.append(sp.csr_matrix(lam * tensor_power(rho, n)))
        else:
            blocks.append(sp.csr_matrix((space.sector_dim(n),) * 2, dtype=complex))
    return MessageMatrix(space, sp.block_diag(blocks, format="csr"))


def canonical(rho, n: int) -> MessageMatrix:
    """``rho^{⊗n}`` as a message matrix on the block space of length ``n``."""
    lambdas = np.zeros(n + 1)
    lambdas[n] = 1.0
    return grand_canonical(lambdas, rho)


def raw_information(x: Union[ManyLetterVector, MessageMatrix]) -> float:
    """Expected raw quantum information ``log2(dim H_Q) <L>`` in qbits."""
    if isinstance(x, ManyLetterVector):
        return math.log2(x.basis_dim) * length_expectation(x)
    if isinstance(x, MessageMatrix):
        tr = x.trace()
        if abs(tr - 1.0) > NORM_TOL:
            raise NormalizationError(f"message matrix has trace {tr!r}, expected 1")
        return math.log2(x.basis_dim) * x.expectation(x.space.length_diagonal())
    raise TypeError(f"expected a ManyLetterVector or MessageMatrix, got {type(x).__name__}")


def _entropy_of(values: np.ndarray, cutoff: float) -> float:
    q = values[values > cutoff]
    return float(-np.sum(q * np.log2(q))) + 0.0  # no negative zero


def von_neumann_entropy(sigma, cutoff: float = EIGEN_CUTOFF) -> float:
    """``S(sigma) = -Tr{sigma log2 sigma}`` in qbits.

    Accepts a :class:`MessageMatrix` or a plain density matrix.
    """
    if isinstance(sigma, MessageMatrix):
        return _entropy_of(sigma.eigenvalues(), cutoff)
    rho = np.atleast_2d(np.asarray(sigma, dtype=complex))
    return _entropy_of(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), cutoff)


def diagonalize(sigma: MessageMatrix, cutoff: float = EIGEN_CUTOFF) -> list:
    """Eigenpairs ``(q_i, |e_i>)`` with ``q_i > cutoff``, largest first.

    Ties keep the eigensolver's order. Eigenvectors carry a fixed phase
    (largest entry real positive) so results are reproducible.
    """
    values, vectors = sigma.eigh()
    order = np.argsort(-values, kind="stable")
    pairs = []
    for j in order:
        if values[j] <= cutoff:
            break
        idx, coeff = vectors[j]
        arr = np.zeros(sigma.space.dim, dtype=complex)
        arr[idx] = coeff
        pairs.append((float(values[j]), ManyLetterVector.from_array(sigma.space, arr)))
    return pairs


def spectrum_arrays(sigma: MessageMatrix, cutoff: float = EIGEN_CUTOFF):
    """Like :func:`diagonalize` but eigenvectors as dense arrays over the space."""
    values, vectors = sigma.eigh()
    order = np.argsort(-values, kind="stable")
    keep = [j for j in order if values[j] > cutoff]
    basis = np.zeros((sigma.space.dim, len(keep)), dtype=complex)
    for col, j in enumerate(keep):
        idx, coeff = vectors[j]
        basis[idx, col] = coeff
    return values[keep], basis


class CanonicalSource:
    """Letter ensemble ``{(p(x), |x>)}`` over a quantum alphabet.

    Generates canonical (``rho^{⊗N}``) and grand canonical message ensembles.
    """

    def __init__(self, alphabet: QuantumAlphabet, probs: Sequence[float]):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (alphabet.size,):
            raise ValueError(f"need {alphabet.size} letter probabilities, got {probs.shape}")
        if np.any(probs <= 0) or abs(probs.sum() - 1.0) > NORM_TOL:
            raise InvariantError(f"letter probabilities must be positive and sum to 1: {probs}")
        self.alphabet = alphabet
        self.probs = probs

    @property
    def basis_dim(self) -> int:
        return self.alphabet.basis_dim

    def letter_matrix(self) -> np.ndarray:
        """``rho = sum_x p(x) |x><x|`` in basis-letter coordinates."""
        x = self.alphabet.letter_coordinates
        return np.einsum("k,ki,kj->ij", self.probs, x, x.conj())

    def strings(self, n: int):
        """All length-``n`` letter strings with their product probabilities."""
        for word in itertools.product(range(self.alphabet.size), repeat=n):
            yield word, float(np.prod(self.probs[list(word)])) if word else 1.0

    def canonical_ensemble(self, n: int) -> MessageEnsemble:
        return MessageEnsemble((p, self.alphabet.string(w)) for w, p in self.strings(n))
