"""Lossless variable-length quantum codes.

Two isometric encoders into binary code strings:

* the symbol code, which Huffman-codes the eigenletters of ``rho`` and
  encodes a grand canonical message letter by letter;
* the general code, which Huffman-codes the eigenvectors of an arbitrary
  message matrix ``sigma`` and sends everything outside its support through
  an escaped letter-wise translator.

Both support an ``ideal`` mode in which information is accounted with the
real lengths ``-log2 q``. The physical codebook is the Huffman one in both
modes, so encoding and decoding always work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .channels import CodePair, KrausChannel, check_kraus, encoded_information
from .classical import huffman_codewords, shannon_entropy
from .core import (
    EIGEN_CUTOFF,
    ManyLetterSpace,
    ManyLetterVector,
    MessageMatrix,
    _check_letter_matrix,
    grand_canonical,
    raw_information,
    spectrum_arrays,
    von_neumann_entropy,
)
from .exceptions import DecodingError, InvariantError, TruncationError
from .schumacher import _eigen_products, letter_eigenbasis
from .translation import build_translator

MODES = ("integer", "ideal")
ISOMETRY_TOL = 1e-10
CODE_BASIS_DIM = 2


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _bits_value(bits: str) -> int:
    return int(bits, 2) if bits else 0


def _ideal_length(q: float, fallback: float) -> float:
    # zero-probability letters never occur; they keep their physical length
    return -math.log2(q) if q > EIGEN_CUTOFF else float(fallback)


def _assemble(targets, lengths, space: ManyLetterSpace, source_dim: int, coeffs: sp.spmatrix, col_offset: int = 0):
    """COO triplets for ``sum_k |code_k><v_k|`` where ``<v_k|`` is row ``k`` of ``coeffs``."""
    coeffs = coeffs.tocoo()
    rows = np.array([space.offset(l) + t for t, l in zip(targets, lengths)], dtype=np.int64)
    return rows[coeffs.row], coeffs.col + col_offset, coeffs.data


@dataclass
class QuantumSymbolCode:
    """Letter-wise code ``C = sum_n C_Q^{⊗n}`` for grand canonical messages.

    ``codewords[a]`` is the binary codeword of the eigenletter ``u_a`` of
    ``rho``; ``lengths`` are its physical lengths and ``ideal_lengths`` the
    values ``-log2 q_a``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    codewords: list
    mode: str
    max_length: int
    encoder: KrausChannel = field(repr=False)
    ideal_code_lengths: np.ndarray = field(repr=False)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(c) for c in self.codewords], dtype=float)

    @property
    def ideal_lengths(self) -> np.ndarray:
        return np.array([_ideal_length(q, len(c)) for q, c in zip(self.eigenvalues, self.codewords)])

    @property
    def letter_lengths(self) -> np.ndarray:
        """Per-letter lengths in the code's accounting mode."""
        return self.ideal_lengths if self.mode == "ideal" else self.lengths

    @property
    def source_space(self) -> ManyLetterSpace:
        return self.encoder.source_space

    @property
    def code_lengths(self) -> np.ndarray | None:
        """Length diagonal used for information accounting (``None`` for physical)."""
        return self.ideal_code_lengths if self.mode == "ideal" else None

    @property
    def pair(self) -> CodePair:
        return CodePair.lossless(self.encoder)

    def letter_encoder(self) -> np.ndarray:
        """``C_Q`` as a matrix from the letter space to binary code strings of length <= max codeword."""
        top = max(len(c) for c in self.codewords)
        space = ManyLetterSpace.truncated(CODE_BASIS_DIM, top)
        out = np.zeros((space.dim, len(self.codewords)), dtype=complex)
        for a, c in enumerate(self.codewords):
            out[space.index(tuple(int(b) for b in c))] += 1.0
        return out @ self.eigenvectors.conj().T


def _concatenations(codewords: list, n: int):
    """Value and length of every ``n``-fold concatenation, lexicographic in letters."""
    values = np.zeros(1, dtype=object)
    lengths = np.zeros(1, dtype=np.int64)
    cv = [_bits_value(c) for c in codewords]
    cl = np.array([len(c) for c in codewords], dtype=np.int64)
    for _ in range(n):
        values = np.concatenate([values * (1 << int(l)) + v for v, l in zip(cv, cl)]).reshape(len(cv), -1).T.ravel()
        lengths = (lengths[:, None] + cl[None, :]).ravel()
    return values, lengths


def build_symbol_code(rho, mode: str = "integer", max_length: int = 4) -> QuantumSymbolCode:
    """Huffman symbol code on the eigenletters of ``rho``, up to ``max_length`` letters.

    All eigenvalues take part in the Huffman construction, zeros included, so
    every source string has a codeword.
    """
    _check_mode(mode)
    rho = _check_letter_matrix(rho)
    q, U = letter_eigenbasis(rho)
    if q.max() <= EIGEN_CUTOFF:
        raise InvariantError("letter matrix has rank 0")
    d = len(q)
    codewords = huffman_codewords(q, list(range(d)))
    source = ManyLetterSpace.truncated(d, max_length)

    per_sector = {}
    code_lengths = set()
    for n in source.lengths:
        vals, lens = _concatenations(codewords, n)
        per_sector[n] = (vals, lens)
        code_lengths.update(int(l) for l in lens)
    code = ManyLetterSpace(CODE_BASIS_DIM, sorted(code_lengths))

    rows, cols, data = [], [], []
    ideal = code.length_diagonal().astype(float)
    ideal_letter = np.array([_ideal_length(qa, len(c)) for qa, c in zip(q, codewords)])
    for n in source.lengths:
        vals, lens = per_sector[n]
        Wh = _eigen_products(U, n).conj().T.tocsr()
        r, c, v = _assemble(vals, lens, code, d**n, Wh, source.offset(n))
        rows.append(r)
        cols.append(c)
        data.append(v)
        idx = np.array([code.offset(int(l)) + int(t) for t, l in zip(vals, lens)], dtype=np.int64)
        ideal[idx] = _ideal_sums(ideal_letter, n)
    C = sp.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(code.dim, source.dim)
    )
    encoder = KrausChannel([C], source, code, name=f"symbol-code({mode})")
    _require_isometry(encoder)
    return QuantumSymbolCode(q, U, codewords, mode, max_length, encoder, ideal)


def _ideal_sums(letter_lengths: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(1)
    for _ in range(n):
        out = (out[:, None] + letter_lengths[None, :]).ravel()
    return out


def _require_isometry(ch: KrausChannel, tol: float = ISOMETRY_TOL) -> None:
    report = check_kraus(ch, tol)
    if not report.passed:
        raise InvariantError(f"{ch.name} is not an isometry (deviation {report.deviation:.3g})")


def compress_grand_canonical(lambdas, rho, code: QuantumSymbolCode | None = None, mode: str = "integer") -> dict:
    """Information report for ``sigma = sum_n lambda_n rho^{⊗n}`` under the symbol code.

    ``S_letters`` is ``sum_n lambda_n n S(rho)``; ``S`` is the entropy of the
    whole message matrix, larger by the entropy of the length distribution.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    top = int(np.flatnonzero(lambdas > 0).max())
    if code is None:
        code = build_symbol_code(rho, mode, top)
    if top > code.max_length:
        raise TruncationError(f"length distribution reaches {top} > L_max={code.max_length}")
    sigma = grand_canonical(lambdas, rho)
    S_rho = von_neumann_entropy(np.asarray(rho))
    mean_n = float(np.dot(np.arange(len(lambdas)), lambdas))
    Ic = encoded_information(code.encoder, sigma, code.code_lengths)
    S_letters = mean_n * S_rho
    S = von_neumann_entropy(sigma)
    return {
        "mode": code.mode,
        "I": raw_information(sigma),
        "I_c": Ic,
        "S_letters": S_letters,
        "S": S,
        "H_lambda": shannon_entropy(lambdas[lambdas > 0]),
        "upper": mean_n * (S_rho + 1),
        "ratio": Ic / raw_information(sigma) if raw_information(sigma) > 0 else float("nan"),
    }


@dataclass
class GeneralLosslessCode:
    """Eigenbasis Huffman code for an arbitrary message matrix.

    Eigenvector ``e_i`` (eigenvalue ``q_i``) is sent to ``codewords[i]``.
    Components outside the support ``M_Gamma`` are translated letter by letter
    at rate ``rate`` behind an escape prefix: the shortest codeword followed by
    a ``1``. Escaped strings extend a codeword, so by the prefix property none
    of them is a codeword and their images are orthogonal to the codebook.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    codewords: list
    mode: str
    rate: int
    escape: str
    encoder: KrausChannel = field(repr=False)
    codeword_indices: np.ndarray = field(repr=False)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(c) for c in self.codewords], dtype=float)

    @property
    def ideal_lengths(self) -> np.ndarray:
        return -np.log2(self.eigenvalues)

    @property
    def source_space(self) -> ManyLetterSpace:
        return self.encoder.source_space

    @property
    def code_lengths(self) -> np.ndarray | None:
        if self.mode != "ideal":
            return None
        lengths = self.encoder.code_space.length_diagonal().astype(float)
        lengths[self.codeword_indices] = self.ideal_lengths
        return lengths

    @property
    def pair(self) -> CodePair:
        return CodePair.lossless(self.encoder)

    def support_projector(self) -> np.ndarray:
        V = self.eigenvectors
        return V @ V.conj().T

    def codebook(self) -> str:
        """Tab-separated ``eigenvalue, length, codeword`` table."""
        lines = ["index\teigenvalue\tlength\tideal_length\tcodeword"]
        for i, (q, c) in enumerate(zip(self.eigenvalues, self.codewords)):
            lines.append(f"{i}\t{q:.12g}\t{len(c)}\t{-math.log2(q):.12g}\t{c}")
        return "\n".join(lines) + "\n"


def build_general_code(sigma: MessageMatrix, mode: str = "integer", cutoff: float = EIGEN_CUTOFF) -> GeneralLosslessCode:
    """Lossless code for ``sigma`` on its (truncated) space plus the empty message."""
    _check_mode(mode)
    q, V = spectrum_arrays(sigma, cutoff)
    if len(q) == 0:
        raise InvariantError(f"no eigenvalue of sigma exceeds the cutoff {cutoff}")
    d = sigma.space.basis_dim
    source = ManyLetterSpace(d, sorted(set(sigma.space.lengths) | {0}))
    if source != sigma.space:
        V = np.column_stack([sigma.space.reindex(V[:, j], source) for j in range(V.shape[1])])

    # a single eigenvector needs no bits at all
    codewords = [""] if len(q) == 1 else huffman_codewords(q, list(range(len(q))))
    P = np.eye(source.dim, dtype=complex) - V @ V.conj().T
    P[np.abs(P) < 1e-15] = 0.0
    # sectors the complement of the support reaches; only they need escape strings
    outside = [n for n in source.lengths if np.abs(P[:, source.sector_slice(n)]).max(initial=0.0) > 1e-10]
    complement = bool(outside)
    # a codeword followed by one more bit is neither a codeword nor a prefix of one
    escape = min(codewords, key=lambda c: (len(c), c)) + "1"
    rate = 0
    lengths = {len(c) for c in codewords}
    if complement:
        t = build_translator(d, CODE_BASIS_DIM, 1)
        rate = t.M
        lengths.update(len(escape) + rate * n for n in outside)
    code = ManyLetterSpace(CODE_BASIS_DIM, sorted(lengths))

    targets = np.array([code.offset(len(c)) + _bits_value(c) for c in codewords], dtype=np.int64)
    C = sp.csr_matrix(
        (np.ones(len(q), dtype=complex), (targets, np.arange(len(q)))), shape=(code.dim, len(q))
    ) @ sp.csr_matrix(V.conj().T)
    if complement:
        T = _escaped_translator(source, code, t, escape, outside)
        C = C + T @ sp.csr_matrix(P)
    C = sp.csc_matrix(C)
    C.eliminate_zeros()
    encoder = KrausChannel([C], source, code, name=f"general-lossless({mode})")
    _require_isometry(encoder)
    return GeneralLosslessCode(q, V, codewords, mode, rate, escape if complement else "", encoder, targets)


def _escaped_translator(source: ManyLetterSpace, code: ManyLetterSpace, t, escape: str, sectors) -> sp.csr_matrix:
    """Letter-wise translation of the strings in ``sectors`` behind ``escape``."""
    head = _bits_value(escape)
    rows, cols = [], []
    block = np.array([_bits_value("".join(map(str, c))) for c in t.mapping], dtype=np.int64)
    for n in sectors:
        local = np.arange(source.sector_dim(n), dtype=np.int64)
        value = np.full_like(local, head)
        rest = local.copy()
        digits = []
        for _ in range(n):
            rest, digit = np.divmod(rest, source.basis_dim)
            digits.append(digit)
        for digit in reversed(digits):
            value = value * (1 << t.M) + block[digit]
        rows.append(code.offset(len(escape) + t.M * n) + value)
        cols.append(source.offset(n) + local)
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    return sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(code.dim, source.dim))


def encode(code, phi: ManyLetterVector) -> ManyLetterVector:
    """``C |phi>`` for a symbol or general code."""
    x = phi.to_array(code.source_space)
    return ManyLetterVector.from_array(code.encoder.code_space, code.encoder.operators[0] @ x, tol=0.0)


def decode(code, psi: ManyLetterVector, tol: float = ISOMETRY_TOL) -> ManyLetterVector:
    """``C^dagger |psi>``; raises :class:`DecodingError` if ``psi`` leaves the code image."""
    C = code.encoder.operators[0]
    y = psi.to_array(code.encoder.code_space)
    x = C.conj().T @ y
    residual = float(np.linalg.norm(y - C @ x))
    if residual > tol:
        raise DecodingError(f"input has norm {residual:.3g} outside the code image", residual=residual)
    return ManyLetterVector.from_array(code.source_space, x, tol=0.0)


def encoded_information_general(code: GeneralLosslessCode, sigma: MessageMatrix) -> float:
    """``I_c(sigma)`` through the encoder, in the code's accounting mode."""
    return encoded_information(code.encoder, sigma, code.code_lengths)


def general_report(code: GeneralLosslessCode, sigma: MessageMatrix) -> dict:
    I = raw_information(sigma)
    Ic = encoded_information_general(code, sigma)
    return {
        "mode": code.mode,
        "rank": len(code.eigenvalues),
        "S": von_neumann_entropy(sigma),
        "I": I,
        "I_c": Ic,
        "ratio": Ic / I if I > 0 else float("nan"),
        "kraft": math.fsum(2.0 ** -code.lengths),
    }


@dataclass
class CoreInformationObservable:
    """``I_0 = -log2 sigma`` on the support plus the raw information off it.

    ``eigenvectors`` are columns over ``space``; ``log_dim`` is
    ``log2 dim H_Q``.
    """

    space: ManyLetterSpace
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_sigma(cls, sigma: MessageMatrix, cutoff: float = EIGEN_CUTOFF) -> "CoreInformationObservable":
        q, V = spectrum_arrays(sigma, cutoff)
        return cls(sigma.space, q, V)

    @classmethod
    def from_spectrum(cls, space: ManyLetterSpace, eigenvalues, eigenvectors) -> "CoreInformationObservable":
        """From explicit eigenpairs, e.g. a rotated basis of a degenerate eigenspace."""
        V = np.asarray(eigenvectors, dtype=complex)
        q = np.asarray(eigenvalues, dtype=float)
        if V.shape != (space.dim, len(q)):
            raise ValueError(f"eigenvectors must have shape {(space.dim, len(q))}")
        if np.abs(V.conj().T @ V - np.eye(len(q))).max() > ISOMETRY_TOL:
            raise InvariantError("eigenvectors are not orthonormal")
        if np.any(q <= 0) or np.any(q > 1 + ISOMETRY_TOL):
            raise InvariantError("eigenvalues must lie in (0, 1]")
        return cls(space, q, V)

    @property
    def log_dim(self) -> float:
        return math.log2(self.space.basis_dim) if self.space.basis_dim > 1 else 0.0

    def operator(self) -> np.ndarray:
        """Dense matrix of ``I_0`` over the space."""
        V = self.eigenvectors
        P = np.eye(self.space.dim) - V @ V.conj().T
        L = np.diag(self.space.length_diagonal() * self.log_dim)
        return V @ np.diag(-np.log2(self.eigenvalues)) @ V.conj().T + P @ L @ P


def core_information(obs: CoreInformationObservable, x) -> float:
    """``<x|I_0|x>`` for a vector or ``Tr{x I_0}`` for a message matrix."""
    V = obs.eigenvectors
    spectral = -np.log2(obs.eigenvalues)
    L = obs.space.length_diagonal() * obs.log_dim
    if isinstance(x, ManyLetterVector):
        v = x.to_array(obs.space)
        c = V.conj().T @ v
        y = v - V @ c
        return float(np.dot(spectral, np.abs(c) ** 2) + np.real(np.vdot(y, L * y)))
    if isinstance(x, MessageMatrix):
        if x.space != obs.space:
            raise ValueError("message matrix lives on a different space than the observable")
        rho = x.matrix
        rV = rho @ V  # (D, r)
        inner = V.conj().T @ rV  # V^dagger rho V
        part = float(np.real(np.dot(spectral, np.diag(inner))))
        # Tr{L P rho P} = Tr{L rho} - 2 Re Tr{L V V^dagger rho} + Tr{V^dagger L V V^dagger rho V}
        LV = L[:, None] * V
        t1 = float(np.real(rho.diagonal() @ L))
        t2 = float(np.real(np.sum(LV.conj() * rV)))
        t3 = float(np.real(np.trace((V.conj().T @ LV) @ inner)))
        return part + t1 - 2 * t2 + t3
    raise TypeError(f"cannot evaluate core information on {type(x).__name__}")
