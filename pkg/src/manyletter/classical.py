"""Classical coding: raw and core information, Kraft, Huffman, typical sets.

All logarithms are base 2 and all information is in bits.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DecodingError, GuardError, InvariantError, ManyLetterError

PROB_TOL = 1e-12
KRAFT_TOL = 1e-12
#: Largest number of strings ``|A|^N`` a typical-set enumeration may visit.
ENUMERATION_GUARD = 10**7


class UnknownSymbolError(ManyLetterError, KeyError):
    pass


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Letter ensemble ``X = {(x, p(x))}``.

    ``alphabet_size`` is ``|A|`` for raw-information scaling and defaults to
    the number of symbols.
    """

    symbols: tuple
    probs: tuple
    alphabet_size: int = None

    def __post_init__(self):
        symbols = tuple(self.symbols)
        probs = tuple(float(p) for p in self.probs)
        if len(symbols) != len(probs) or not symbols:
            raise ValueError("need one probability per symbol and at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError("symbols must be distinct")
        if any(p <= 0 for p in probs):
            raise InvariantError(f"all probabilities must be positive, got {probs}")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise InvariantError(f"probabilities sum to {math.fsum(probs)!r}, expected 1")
        size = len(symbols) if self.alphabet_size is None else int(self.alphabet_size)
        if size < len(symbols):
            raise ValueError("alphabet_size is smaller than the number of symbols")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "alphabet_size", size)

    @classmethod
    def from_probs(cls, probs: Sequence[float], symbols=None) -> "ClassicalEnsemble":
        """Ensemble over symbols ``0..k-1`` (or the given ones)."""
        if symbols is None:
            symbols = range(len(probs))
        return cls(tuple(symbols), tuple(probs))

    def prob(self, symbol) -> float:
        try:
            return self.probs[self.symbols.index(symbol)]
        except ValueError:
            raise UnknownSymbolError(symbol) from None

    def as_dict(self) -> dict:
        return dict(zip(self.symbols, self.probs))


def shannon_entropy(probs) -> float:
    """``H = -sum p log2 p``; zero probabilities contribute nothing."""
    p = np.asarray(getattr(probs, "probs", probs), dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
        raise InvariantError(f"not a probability distribution: {p}")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0  # no negative zero


def raw_info_classical(message: Sequence, ensemble: ClassicalEnsemble) -> float:
    """``I(x) = log2|A| * L(x)`` in bits."""
    known = set(ensemble.symbols)
    for s in message:
        if s not in known:
            raise UnknownSymbolError(s)
    return math.log2(ensemble.alphabet_size) * len(message)


def core_information(message, ensemble: ClassicalEnsemble) -> float:
    """Shannon information content ``-log2 p(x)`` of a single symbol."""
    return -math.log2(ensemble.prob(message))


def ensemble_core_information(ensemble: ClassicalEnsemble) -> float:
    """Average of :func:`core_information`; equals the Shannon entropy."""
    return math.fsum(p * core_information(s, ensemble) for s, p in zip(ensemble.symbols, ensemble.probs))


@dataclass
class PrefixCode:
    """Binary symbol code.

    In ``"integer"`` mode ``codewords`` maps each symbol to a bit string. In
    ``"ideal"`` mode only real-valued ``ideal_lengths`` are tracked.
    """

    codewords: dict = field(default_factory=dict)
    mode: str = "integer"
    ideal_lengths: dict = None

    def __post_init__(self):
        if self.mode not in ("integer", "ideal"):
            raise ValueError(f"mode must be 'integer' or 'ideal', got {self.mode!r}")
        if self.mode == "ideal" and self.ideal_lengths is None:
            raise ValueError("ideal mode needs ideal_lengths")
        for word in self.codewords.values():
            if set(word) - {"0", "1"}:
                raise ValueError(f"codeword {word!r} is not a bit string")

    @classmethod
    def ideal(cls, ensemble: ClassicalEnsemble) -> "PrefixCode":
        return cls(
            mode="ideal",
            ideal_lengths={s: -math.log2(p) for s, p in zip(ensemble.symbols, ensemble.probs)},
        )

    @property
    def symbols(self) -> list:
        return list(self.ideal_lengths if self.mode == "ideal" else self.codewords)

    def lengths(self) -> dict:
        if self.mode == "ideal":
            return dict(self.ideal_lengths)
        return {s: len(w) for s, w in self.codewords.items()}

    def expected_length(self, ensemble: ClassicalEnsemble) -> float:
        lengths = self.lengths()
        return math.fsum(p * lengths[s] for s, p in zip(ensemble.symbols, ensemble.probs))

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords.values())
        # after sorting, a prefix always sits directly before some extension of it
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))


def kraft_sum(code: PrefixCode) -> float:
    """``sum_x 2^{-L_c(x)}``."""
    return math.fsum(2.0 ** -length for length in code.lengths().values())


def kraft_ok(code: PrefixCode, tol: float = KRAFT_TOL) -> bool:
    return kraft_sum(code) <= 1.0 + tol


def _symbol_ranks(symbols: Sequence) -> list:
    try:
        order = sorted(range(len(symbols)), key=lambda i: symbols[i])
    except TypeError:
        order = list(range(len(symbols)))
    ranks = [0] * len(symbols)
    for r, i in enumerate(order):
        ranks[i] = r
    return ranks


def huffman_codewords(weights: Sequence[float], ranks: Sequence[int] | None = None) -> list:
    """Huffman codewords for nonnegative ``weights``, in input order.

    Nodes are merged in order of ``(weight, smallest contained rank)``; of the
    two merged nodes the smaller gets bit 0. A single weight gets ``"0"``.
    """
    k = len(weights)
    if k == 0:
        raise ValueError("need at least one weight")
    if ranks is None:
        ranks = list(range(k))
    if k == 1:
        return ["0"]
    heap = [(float(w), r, (i,)) for i, (w, r) in enumerate(zip(weights, ranks))]
    heapq.heapify(heap)
    words = [""] * k
    while len(heap) > 1:
        w0, r0, leaves0 = heapq.heappop(heap)
        w1, r1, leaves1 = heapq.heappop(heap)
        for i in leaves0:
            words[i] = "0" + words[i]
        for i in leaves1:
            words[i] = "1" + words[i]
        heapq.heappush(heap, (w0 + w1, min(r0, r1), leaves0 + leaves1))
    return words


def huffman_build(ensemble: ClassicalEnsemble) -> PrefixCode:
    """Optimal binary prefix code for ``ensemble``."""
    words = huffman_codewords(ensemble.probs, _symbol_ranks(ensemble.symbols))
    return PrefixCode(dict(zip(ensemble.symbols, words)))


def symbol_encode(code: PrefixCode, message: Sequence) -> str:
    if code.mode != "integer":
        raise ValueError("ideal-mode codes carry lengths only and cannot encode")
    try:
        return "".join(code.codewords[s] for s in message)
    except KeyError as exc:
        raise UnknownSymbolError(exc.args[0]) from None


def symbol_decode(code: PrefixCode, bits: str) -> list:
    """Left-to-right decode of a concatenation of codewords."""
    if code.mode != "integer":
        raise ValueError("ideal-mode codes carry lengths only and cannot decode")
    inverse = {w: s for s, w in code.codewords.items()}
    longest = max(map(len, inverse))
    out, buf = [], ""
    for pos, bit in enumerate(bits):
        if bit not in "01":
            raise DecodingError(f"non-binary character {bit!r} at position {pos}")
        buf += bit
        if buf in inverse:
            out.append(inverse[buf])
            buf = ""
        elif len(buf) >= longest:
            raise DecodingError(f"no codeword matches {buf!r} ending at position {pos}")
    if buf:
        raise DecodingError(f"trailing partial codeword {buf!r}")
    return out


@dataclass(frozen=True)
class TypicalSet:
    members: frozenset
    N: int
    delta: float
    total_prob: float
    entropy: float

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return tuple(x) in self.members

    @property
    def size_bound(self) -> float:
        """Upper bound ``2^{N(H+delta)}`` on the number of members."""
        return 2.0 ** (self.N * (self.entropy + self.delta))


def _check_guard(k: int, N: int) -> None:
    if k**N > ENUMERATION_GUARD:
        raise GuardError(
            f"enumerating {k}^{N} strings exceeds the guard of {ENUMERATION_GUARD}"
        )


def typical_members(probs: Sequence[float], N: int, delta: float) -> list:
    """Index strings whose probability lies strictly within ``2^{-N(H±delta)}``.

    Strings are tuples of indices into ``probs``, lexicographically ordered.
    The decision is made once per composition (type class) in the log domain.
    """
    probs = np.asarray(probs, dtype=float)
    k = len(probs)
    _check_guard(k, N)
    H = shannon_entropy(probs)
    lo, hi = -N * (H + delta), -N * (H - delta)
    logp = np.log2(probs)
    typical_types = set()
    for counts in _compositions(N, k):
        lp = float(np.dot(counts, logp))
        if lo < lp < hi:
            typical_types.add(counts)
    members = []
    for word in itertools.product(range(k), repeat=N):
        counts = tuple(np.bincount(word, minlength=k)) if N else (0,) * k
        if counts in typical_types:
            members.append(word)
    return members


def _compositions(N: int, k: int):
    """All nonnegative integer vectors of length ``k`` summing to ``N``."""
    if k == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in _compositions(N - first, k - 1):
            yield (first,) + rest


def typical_set(ensemble: ClassicalEnsemble, N: int, delta: float) -> TypicalSet:
    """Exact typical set ``T_delta^N`` by enumeration."""
    if N < 0 or delta < 0:
        raise ValueError("N and delta must be nonnegative")
    idx_members = typical_members(ensemble.probs, N, delta)
    probs = np.asarray(ensemble.probs)
    members = frozenset(tuple(ensemble.symbols[i] for i in w) for w in idx_members)
    total = math.fsum(float(np.prod(probs[list(w)])) for w in idx_members)
    H = shannon_entropy(probs)
    ts = TypicalSet(members, N, float(delta), total, H)
    if len(ts) > ts.size_bound * (1 + 1e-12):
        raise InvariantError(f"|T|={len(ts)} exceeds the bound {ts.size_bound}")
    return ts


@dataclass(frozen=True)
class BlockCodeword:
    bits: str
    is_junk: bool


class BlockCode:
    """Lossy block code: typical blocks get distinct indices, the rest junk.

    Typical strings are numbered in lexicographic order of their index
    strings. When some strings are untypical the junk string is the next
    free index, so the width is ``ceil(log2(|T|+1))``; otherwise it is
    ``ceil(log2|T|)``.
    """

    def __init__(self, ensemble: ClassicalEnsemble, N: int, delta: float):
        self.ensemble = ensemble
        self.N = N
        self.delta = delta
        idx_members = typical_members(ensemble.probs, N, delta)
        self.typical = typical_set(ensemble, N, delta)
        words = [tuple(ensemble.symbols[i] for i in w) for w in idx_members]
        total = len(ensemble.symbols) ** N
        self.lossless = len(words) == total
        n_codes = len(words) if self.lossless else len(words) + 1
        self.width = math.ceil(math.log2(n_codes)) if n_codes > 1 else 0
        self._index = {w: i for i, w in enumerate(words)}
        self._words = words
        self.junk_bits = None if self.lossless else self._bits(len(words))

    def _bits(self, i: int) -> str:
        return format(i, "b").zfill(self.width) if self.width else ""

    @property
    def bits_per_letter(self) -> float:
        return self.width / self.N if self.N else 0.0

    def encode(self, block: Sequence) -> BlockCodeword:
        block = tuple(block)
        if len(block) != self.N:
            raise ValueError(f"block has length {len(block)}, expected {self.N}")
        for s in block:
            if s not in self.ensemble.symbols:
                raise UnknownSymbolError(s)
        if block in self._index:
            return BlockCodeword(self._bits(self._index[block]), False)
        return BlockCodeword(self.junk_bits, True)

    def decode(self, bits: str):
        """The typical block for ``bits``, or ``None`` for the junk string."""
        if len(bits) != self.width or set(bits) - {"0", "1"}:
            raise DecodingError(f"{bits!r} is not a {self.width}-bit block codeword")
        if bits == self.junk_bits:
            return None
        i = int(bits, 2) if bits else 0
        if i >= len(self._words):
            raise DecodingError(f"{bits!r} is not assigned")
        return self._words[i]

    def success_probability(self) -> float:
        """Exact ``sum_x p(x) [decode(encode(x)) == x]`` over all blocks."""
        probs = dict(zip(self.ensemble.symbols, self.ensemble.probs))
        total = []
        for block in itertools.product(self.ensemble.symbols, repeat=self.N):
            if self.decode(self.encode(block).bits) == block:
                total.append(math.prod(probs[s] for s in block))
        return math.fsum(total)


def block_code(ensemble: ClassicalEnsemble, N: int, delta: float) -> BlockCode:
    return BlockCode(ensemble, N, delta)


def typical_report(ensemble: ClassicalEnsemble, Ns: Sequence[int], delta: float) -> list:
    """Rows ``(N, delta, |T|, P_T, bits/letter)`` for each block length."""
    rows = []
    for N in Ns:
        code = BlockCode(ensemble, N, delta)
        rows.append(
            {
                "N": N,
                "delta": delta,
                "T": len(code.typical),
                "P_T": code.typical.total_prob,
                "bits_per_letter": code.bits_per_letter,
            }
        )
    return rows
