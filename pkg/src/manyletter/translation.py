"""Lossless translation between quantum alphabets.

A block translator relabels every block of ``N`` source basis letters as a
block of ``M`` code basis letters. The message translator applies it
block-wise to every aligned string, so it is an isometry on the space of
strings whose length is a multiple of ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .channels import KrausChannel, encoded_information
from .core import ManyLetterSpace, ManyLetterVector, MessageMatrix, QuantumAlphabet, raw_information
from .exceptions import AlignmentError, InvariantError, TruncationError

AUDIT_TOL = 1e-10


def _dim(alphabet) -> int:
    return alphabet.basis_dim if isinstance(alphabet, QuantumAlphabet) else int(alphabet)


def _digits(value: int, base: int, width: int) -> tuple:
    out = []
    for _ in range(width):
        value, r = divmod(value, base)
        out.append(r)
    return tuple(reversed(out))


@dataclass(frozen=True)
class BlockTranslator:
    """Injective map from source blocks ``a^N`` to code blocks ``c^M``.

    ``mapping[i]`` is the code block assigned to the ``i``-th source block in
    lexicographic order.
    """

    source_dim: int
    code_dim: int
    N: int
    M: int
    mapping: tuple

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValueError("block lengths must be positive")
        if self.code_dim**self.M < self.source_dim**self.N:
            raise InvariantError(
                f"{self.code_dim}^{self.M} code blocks cannot hold {self.source_dim}^{self.N} source blocks"
            )
        if len(self.mapping) != self.source_dim**self.N:
            raise ValueError("mapping must cover every source block")
        if len(set(self.mapping)) != len(self.mapping):
            raise InvariantError("block translator is not injective")
        for block in self.mapping:
            if len(block) != self.M or any(not 0 <= c < self.code_dim for c in block):
                raise ValueError(f"invalid code block {block}")

    @property
    def rate(self) -> float:
        return self.M / self.N

    @property
    def ideal_rate(self) -> float:
        """Smallest rate allowed by decodability, ``log dim H_Q / log dim H_C``."""
        if self.source_dim == 1:
            return 0.0
        return math.log2(self.source_dim) / math.log2(self.code_dim)

    def translate_block(self, block) -> tuple:
        index = 0
        for a in block:
            index = index * self.source_dim + a
        return self.mapping[index]

    def table(self) -> str:
        """Tab-separated ``source block -> code block`` listing."""
        lines = ["source_block\tcode_block"]
        for i, code in enumerate(self.mapping):
            src = _digits(i, self.source_dim, self.N)
            lines.append(f"{''.join(map(str, src))}\t{''.join(map(str, code))}")
        return "\n".join(lines) + "\n"


def build_translator(source_alphabet, code_alphabet, N: int) -> BlockTranslator:
    """Translator with the smallest ``M`` such that ``dC^M >= dQ^N``.

    Code blocks are handed out in lexicographic order, so source block ``i``
    gets the code block whose base-``dC`` value is ``i``. ``M`` is at least 1
    even for a one-letter source, otherwise strings of different lengths
    would collapse onto the empty code string.
    """
    dq, dc = _dim(source_alphabet), _dim(code_alphabet)
    if N < 1:
        raise ValueError("N must be positive")
    if dc < 2 and dq > 1:
        raise InvariantError("a one-letter code alphabet cannot hold a larger source")
    M = 1
    while dc**M < dq**N:
        M += 1
    mapping = tuple(_digits(i, dc, M) for i in range(dq**N))
    return BlockTranslator(dq, dc, N, M, mapping)


def aligned_space(basis_dim: int, N: int, max_length: int) -> ManyLetterSpace:
    return ManyLetterSpace(basis_dim, range(0, max_length + 1, N))


def message_translator(t: BlockTranslator, max_length: int) -> KrausChannel:
    """``T = sum_n t^{⊗n}`` on aligned strings up to ``max_length``."""
    source = aligned_space(t.source_dim, t.N, max_length)
    code = ManyLetterSpace(t.code_dim, [n // t.N * t.M for n in source.lengths])
    src_base, code_base = t.source_dim**t.N, t.code_dim**t.M
    # lexicographic pairing: block value b maps to code block value b
    block_value = np.array([_value(c, t.code_dim) for c in t.mapping], dtype=np.int64)
    rows, cols = [], []
    for n in source.lengths:
        k = n // t.N
        local = np.arange(source.sector_dim(n), dtype=np.int64)
        code_local = np.zeros_like(local)
        rest = local.copy()
        for j in range(k):
            rest, digit = np.divmod(rest, src_base)
            code_local += block_value[digit] * code_base**j
        cols.append(source.offset(n) + local)
        rows.append(code.offset(k * t.M) + code_local)
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    T = sp.csc_matrix(
        (np.ones(len(rows), dtype=complex), (rows, cols)), shape=(code.dim, source.dim)
    )
    return KrausChannel([T], source, code, name=f"translator(N={t.N},M={t.M})")


def _value(block, base: int) -> int:
    v = 0
    for c in block:
        v = v * base + c
    return v


def check_aligned(lengths, N: int) -> None:
    bad = [n for n in lengths if n % N]
    if bad:
        raise AlignmentError(f"string lengths {bad} are not multiples of the block length {N}")


def translate(t: BlockTranslator, phi: ManyLetterVector, max_length: int | None = None) -> ManyLetterVector:
    """Apply the message translator to a vector, block by block."""
    if phi.basis_dim != t.source_dim:
        raise ValueError(f"vector basis_dim {phi.basis_dim} != translator source {t.source_dim}")
    check_aligned(phi.lengths, t.N)
    if max_length is not None and phi.max_length > max_length:
        raise TruncationError(f"string length {phi.max_length} exceeds L_max={max_length}")
    out = {}
    for key, amp in phi.amplitudes.items():
        code = ()
        for j in range(0, len(key), t.N):
            code += t.translate_block(key[j : j + t.N])
        out[code] = amp
    return ManyLetterVector(out, t.code_dim)


def untranslate(t: BlockTranslator, psi: ManyLetterVector) -> ManyLetterVector:
    """Adjoint of :func:`translate`; components outside the image are dropped."""
    inverse = {c: _digits(i, t.source_dim, t.N) for i, c in enumerate(t.mapping)}
    out = {}
    for key, amp in psi.amplitudes.items():
        if len(key) % t.M:
            continue
        src = ()
        for j in range(0, len(key), t.M):
            block = inverse.get(key[j : j + t.M])
            if block is None:
                break
            src += block
        else:
            out[src] = amp
    return ManyLetterVector(out, t.source_dim)


def _check_sigma_aligned(sigma: MessageMatrix, N: int) -> None:
    weights = sigma.sector_weights()
    check_aligned([n for n, w in weights.items() if w != 0], N)
    for n in sigma.space.lengths:
        if n % N:
            sl = sigma.space.sector_slice(n)
            if sigma.matrix[sl].nnz or sigma.matrix[:, sl].nnz:
                raise AlignmentError(f"message has coherences on unaligned length {n}")


def translation_information_audit(t: BlockTranslator, sigma: MessageMatrix, tol: float = AUDIT_TOL) -> dict:
    """Source and encoded information of ``sigma`` under the message translator.

    The encoded value is measured through the pulled-back length observable
    and checked against ``R log dC / log dQ * I``.
    """
    _check_sigma_aligned(sigma, t.N)
    top = sigma.space.max_length // t.N * t.N
    ch = message_translator(t, top)
    I = raw_information(sigma)
    Ic = encoded_information(ch, sigma)
    if t.source_dim > 1:
        predicted = t.rate * math.log2(t.code_dim) / math.log2(t.source_dim) * I
    else:
        predicted = math.log2(t.code_dim) * t.rate * sigma.expectation(sigma.space.length_diagonal())
    if abs(Ic - predicted) > tol:
        raise InvariantError(f"encoded information {Ic!r} differs from R-scaled value {predicted!r}")
    return {
        "N": t.N,
        "M": t.M,
        "R": t.rate,
        "I": I,
        "I_c": Ic,
        "ratio": Ic / I if I > 0 else float("nan"),
        "compressive": Ic <= I + tol,
    }
