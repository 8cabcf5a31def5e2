"""Lossy typical-subspace compression.

The standard scheme encodes the typical subspace of ``rho^{⊗N}`` into code
strings of a fixed length ``R`` and sends everything else to one junk
codeword. The generalized scheme does the same in every length sector of a
grand canonical message, with per-sector rates and the empty message as
junk.

Both decoders send untypical input to the empty message ``|·>``. It is
orthogonal to every nonempty source string, so a failed transmission never
counts as a success by accident.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .channels import (
    CodePair,
    KrausChannel,
    check_kraus,
    encoded_information,
    pulled_back_lengths,
)
from .classical import ENUMERATION_GUARD, shannon_entropy, typical_members
from .core import (
    EIGEN_CUTOFF,
    CanonicalSource,
    ManyLetterSpace,
    QuantumAlphabet,
    _check_letter_matrix,
    _fix_phase,
    grand_canonical,
    raw_information,
)
from .exceptions import GuardError, InvariantError, TruncationError

MAX_RATE = 64
ENSEMBLE_TOL = 1e-10


def letter_eigenbasis(rho) -> tuple:
    """Eigenvalues and eigenvectors (columns) of a letter matrix.

    A diagonal ``rho`` keeps the basis letters themselves, in order, so the
    resulting codes stay sparse; otherwise eigenvalues come largest first.
    """
    rho = _check_letter_matrix(rho)
    d = rho.shape[0]
    if np.count_nonzero(rho - np.diag(np.diag(rho))) == 0:
        return np.clip(np.diag(rho).real, 0.0, None), np.eye(d, dtype=complex)
    w, v = np.linalg.eigh(rho)
    order = np.argsort(-w, kind="stable")
    w = np.clip(w[order], 0.0, None)
    v = np.column_stack([_fix_phase(v[:, j]) for j in order])
    return w, v


def _code_dim(code_alphabet) -> int:
    return code_alphabet.basis_dim if isinstance(code_alphabet, QuantumAlphabet) else int(code_alphabet)


def _eigen_products(U: np.ndarray, n: int) -> sp.csr_matrix:
    """``U^{⊗n}``: column ``i`` is the eigen-string with lexicographic index ``i``."""
    out = sp.csr_matrix(np.ones((1, 1), dtype=complex))
    Us = sp.csr_matrix(U)
    for _ in range(n):
        out = sp.kron(out, Us, format="csr")
    return out


@dataclass(frozen=True)
class QuantumTypicalSubspace:
    """Span of the typical eigen-strings of ``rho^{⊗N}``.

    ``members`` are strings of eigenvector indices, lexicographically ordered.
    """

    N: int
    delta: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    members: tuple
    total_prob: float
    entropy: float

    @property
    def dim(self) -> int:
        return len(self.members)

    @property
    def basis_dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim_bound(self) -> float:
        return 2.0 ** (self.N * (self.entropy + self.delta))

    def member_indices(self) -> np.ndarray:
        d = self.basis_dim
        out = np.zeros(len(self.members), dtype=np.int64)
        for i, word in enumerate(self.members):
            v = 0
            for a in word:
                v = v * d + a
            out[i] = v
        return out

    def projector(self) -> sp.csr_matrix:
        """``Pi_T`` on the length-``N`` block space, in basis-letter coordinates."""
        W = _eigen_products(self.eigenvectors, self.N)[:, self.member_indices()]
        return (W @ W.conj().T).tocsr()

    def overlap_weights(self, letters: np.ndarray) -> np.ndarray:
        """``||Pi_T |x^N>||^2`` for every letter string ``x^N`` (lexicographic).

        ``letters`` holds letter coordinates row-wise in basis-letter
        coordinates.
        """
        overlaps = np.abs(letters.conj() @ self.eigenvectors) ** 2  # (k, d): |<u_a|x>|^2
        k = letters.shape[0]
        weights = np.zeros(k**self.N)
        members = np.asarray(self.members, dtype=np.int64).reshape(len(self.members), self.N)
        if not self.members:
            return weights
        for idx, word in enumerate(itertools.product(range(k), repeat=self.N)):
            # overlaps[word[j], members[i, j]], multiplied along j, summed over i
            weights[idx] = np.prod(overlaps[np.asarray(word, dtype=np.int64), members], axis=1).sum()
        return weights


def quantum_typical_subspace(rho, N: int, delta: float) -> QuantumTypicalSubspace:
    """Typical eigen-strings of ``rho^{⊗N}``, by exact enumeration over the support."""
    q, U = letter_eigenbasis(rho)
    if N == 0:
        # the empty message is certain, so it is its own typical set
        return QuantumTypicalSubspace(0, float(delta), q, U, ((),), 1.0, shannon_entropy(q[q > EIGEN_CUTOFF]))
    support = np.flatnonzero(q > EIGEN_CUTOFF)
    if len(support) ** N > ENUMERATION_GUARD:
        raise GuardError(f"rank {len(support)} ^ N={N} exceeds the enumeration guard")
    qs = q[support] / q[support].sum()
    members = tuple(tuple(int(support[i]) for i in w) for w in typical_members(qs, N, delta))
    total = math.fsum(float(np.prod(q[list(w)])) for w in members)
    H = shannon_entropy(qs)
    ts = QuantumTypicalSubspace(N, float(delta), q, U, members, total, H)
    if ts.dim > ts.dim_bound * (1 + 1e-12):
        raise InvariantError(f"dim V={ts.dim} exceeds the bound {ts.dim_bound}")
    return ts


def _leak_family(code_space: ManyLetterSpace, unused: np.ndarray, target: ManyLetterSpace) -> list:
    """Decoder operators ``|·><c|`` for each unused code string ``c``."""
    empty = target.index(())
    return [
        sp.csc_matrix(([1.0 + 0j], ([empty], [int(c)])), shape=(target.dim, code_space.dim))
        for c in unused
    ]


@dataclass
class SchumacherCode:
    """Standard block Schumacher code on ``rho^{⊗N}``.

    The channels act on the source space with sectors ``{0, N}`` and the code
    space with sectors ``{0, R}``; the empty message passes through
    unchanged so decoded junk has somewhere orthogonal to go.
    """

    subspace: QuantumTypicalSubspace
    code_dim: int
    rate: int
    encoder: KrausChannel
    decoder: KrausChannel
    junk_index: int | None
    rho: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.subspace.N

    @property
    def pair(self) -> CodePair:
        return CodePair(self.encoder, self.decoder)

    @property
    def ideal_rate(self) -> float:
        """Real rate meeting the rate bound with equality."""
        if self.subspace.dim <= 1:
            return 0.0
        return math.log2(self.subspace.dim) / math.log2(self.code_dim)

    @property
    def junk_codeword(self) -> tuple | None:
        if self.junk_index is None:
            return None
        return self.encoder.code_space.key(self.junk_index)

    def discarded_lengths(self) -> np.ndarray:
        """Code lengths with the junk codeword counted as length 0."""
        lengths = self.encoder.code_space.length_diagonal()
        if self.junk_index is not None:
            lengths[self.junk_index] = 0.0
        return lengths

    def canonical_matrix(self):
        lambdas = np.zeros(self.N + 1)
        lambdas[self.N] = 1.0
        return grand_canonical(lambdas, self.rho)

    def information(self, sigma=None) -> dict:
        """Source and encoded information under both junk-length conventions."""
        if sigma is None:
            sigma = self.canonical_matrix()
        log_dc = math.log2(self.code_dim)
        return {
            "I": raw_information(sigma),
            "I_c": encoded_information(self.encoder, sigma, self.discarded_lengths()),
            "I_c_physical": encoded_information(self.encoder, sigma),
            "I_c_ideal": self.ideal_rate * log_dc * self.subspace.total_prob,
        }


def _minimal_rate(needed: int, code_dim: int, minimum: int = 1, max_rate: int = MAX_RATE) -> int:
    R = minimum
    while code_dim**R < needed:
        R += 1
        if R > max_rate or code_dim < 2:
            raise TruncationError(
                f"code alphabet of dimension {code_dim} cannot hold {needed} codewords within length {max_rate}"
            )
    return R


def build_schumacher(rho, N: int, delta: float, code_alphabet=2, max_rate: int = MAX_RATE) -> SchumacherCode:
    """Typical-subspace encoder/decoder families for block length ``N``.

    Typical strings get the code strings ``0, 1, 2, ...`` of length ``R`` in
    order; the junk codeword is the next one. ``R`` is the smallest length
    that fits all typical strings plus the junk codeword (no junk is needed
    when every string is typical).
    """
    if N < 1:
        raise ValueError("block length N must be positive")
    rho = _check_letter_matrix(rho)
    dc = _code_dim(code_alphabet)
    ts = quantum_typical_subspace(rho, N, delta)
    d = rho.shape[0]
    total = d**N
    need_junk = ts.dim < total
    R = _minimal_rate(ts.dim + int(need_junk), dc, 1, max_rate)

    source = ManyLetterSpace(d, (0, N))
    code = ManyLetterSpace(dc, (0, R))
    W = _eigen_products(ts.eigenvectors, N)  # eigen-string index -> block coordinates
    src_off, code_off = source.offset(N), code.offset(R)
    members = ts.member_indices()

    # E_T: empty -> empty, typical eigen-string i -> code string number i
    assign = sp.csr_matrix(
        (np.ones(len(members), dtype=complex), (code_off + np.arange(len(members)), members)),
        shape=(code.dim, total),
    )
    block = (assign @ W.conj().T).tocoo()
    E_T = sp.csr_matrix(
        (
            np.concatenate([[1.0 + 0j], block.data]),
            (
                np.concatenate([[code.index(())], block.row]),
                np.concatenate([[source.index(())], block.col + src_off]),
            ),
        ),
        shape=(code.dim, source.dim),
    )
    ops = [E_T]
    junk = None
    if need_junk:
        junk = code_off + len(members)
        untypical = np.setdiff1d(np.arange(total), members)
        Wh = W.conj().T.tocsr()
        for b in untypical:
            row = Wh[b]
            ops.append(
                sp.csr_matrix(
                    (row.data, (np.full(row.nnz, junk), row.indices + src_off)),
                    shape=(code.dim, source.dim),
                )
            )
    encoder = KrausChannel(ops, source, code, name=f"schumacher(N={N},delta={delta})")

    unused = np.setdiff1d(np.arange(code_off, code_off + dc**R), code_off + np.arange(len(members)))
    decoder = KrausChannel(
        [E_T.conj().T] + _leak_family(code, unused, source), code, source, name="schumacher-decoder"
    )
    for ch in (encoder, decoder):
        report = check_kraus(ch)
        if not report.passed:
            raise InvariantError(f"{ch.name} fails the Kraus property (deviation {report.deviation:.3g})")
    return SchumacherCode(ts, dc, R, encoder, decoder, junk, rho)


@dataclass(frozen=True)
class SchumacherConfidence:
    fidelity: float
    bound: float
    P_T: float


def _check_source(code_rho: np.ndarray, source: CanonicalSource) -> None:
    diff = np.abs(source.letter_matrix() - code_rho).max()
    if diff > ENSEMBLE_TOL:
        raise InvariantError(f"letter ensemble does not reproduce rho (max deviation {diff:.3g})")


def schumacher_confidence(code: SchumacherCode, source: CanonicalSource, tol: float = 1e-10) -> SchumacherConfidence:
    """Exact confidence ``sum_x p(x^N) ||Pi_T |x^N>||^4`` and its lower bound."""
    _check_source(code.rho, source)
    weights = code.subspace.overlap_weights(source.alphabet.letter_coordinates)
    probs = np.array([p for _, p in source.strings(code.N)])
    F = float(np.dot(probs, weights**2))
    P_T = code.subspace.total_prob
    bound = 2 * P_T - 1
    if F < bound - tol:
        raise InvariantError(f"confidence {F!r} violates the bound 2 P_T - 1 = {bound!r}")
    return SchumacherConfidence(F, bound, P_T)


@dataclass
class GeneralizedSchumacherCode:
    """Sector-wise Schumacher code on the truncated many-letter space.

    ``rates[n]`` is the codeword length used for typical strings of length
    ``n`` (``None`` for sectors that are not encoded: no typical strings, or
    ``lambda_n = 0``). Codewords are unique across sectors: a sector's rate
    is raised when shorter sectors already occupy the code strings of that
    length.
    """

    subspaces: dict
    code_dim: int
    rates: dict
    encoder: KrausChannel
    decoder: KrausChannel
    rho: np.ndarray = field(repr=False)

    @property
    def pair(self) -> CodePair:
        return CodePair(self.encoder, self.decoder)

    @property
    def source_space(self) -> ManyLetterSpace:
        return self.encoder.source_space

    def typical_probability(self, lambdas) -> float:
        """``P_T = sum_n lambda_n P_{T^n}``."""
        return math.fsum(
            lam * self.subspaces[n].total_prob for n, lam in enumerate(lambdas) if lam > 0
        )

    def predicted_information(self, lambdas) -> float:
        """``sum_n lambda_n r(n) log2(dim H_C) P_{T^n}``."""
        log_dc = math.log2(self.code_dim)
        return math.fsum(
            lam * (self.rates[n] or 0) * log_dc * self.subspaces[n].total_prob
            for n, lam in enumerate(lambdas)
            if lam > 0
        )

    def ideal_information(self, lambdas) -> float:
        """Same sum with ideal rates ``log dim V^n / log dim H_C``."""
        return math.fsum(
            lam * (math.log2(self.subspaces[n].dim) if self.subspaces[n].dim else 0.0)
            * self.subspaces[n].total_prob
            for n, lam in enumerate(lambdas)
            if lam > 0
        )

    def compression_margin(self) -> float:
        """Smallest eigenvalue of ``I - I_c`` over all sectors of the source space.

        Nonnegative iff the code is compressive as a quadratic form.
        """
        space = self.source_space
        log_dq = math.log2(space.basis_dim) if space.basis_dim > 1 else 0.0
        Ic = pulled_back_lengths(self.encoder) * math.log2(self.code_dim)
        worst = np.inf
        for n in space.lengths:
            sl = space.sector_slice(n)
            block = Ic[sl, sl].toarray()
            diff = n * log_dq * np.eye(block.shape[0]) - block
            worst = min(worst, float(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)).min()))
        return worst


def generalized_schumacher(
    lambdas, rho, delta: float, code_alphabet=2, max_length: int | None = None, max_rate: int = MAX_RATE
) -> GeneralizedSchumacherCode:
    """Schumacher code over every length up to the support of ``lambdas``.

    Each sector ``n`` with ``lambda_n > 0`` encodes its typical strings into
    distinct code strings of length ``r(n)``, the shortest length with room
    left after the lower sectors. The empty code string is reserved: it is
    the image of the empty message and of every untypical string, including
    all strings of lengths the source never emits. Unused code strings decode
    to the empty message.
    """
    rho = _check_letter_matrix(rho)
    lambdas = np.asarray(lambdas, dtype=float)
    top = int(np.flatnonzero(lambdas > 0).max())
    if max_length is not None:
        if top > max_length:
            raise TruncationError(f"length distribution reaches {top} > L_max={max_length}")
        top = max_length
    d = rho.shape[0]
    dc = _code_dim(code_alphabet)
    subspaces = {n: quantum_typical_subspace(rho, n, delta) for n in range(top + 1)}

    used: dict = {0: 1}
    rates: dict = {0: 0}
    for n in range(1, top + 1):
        dim = subspaces[n].dim
        if n >= len(lambdas) or lambdas[n] <= 0 or dim == 0:
            rates[n] = None
            continue
        r = 1
        while dc**r < used.get(r, 0) + dim:
            r += 1
            if r > max_rate or dc < 2:
                raise TruncationError(f"sector {n} needs codewords longer than {max_rate}")
        rates[n] = r
        used[r] = used.get(r, 0) + dim

    source = ManyLetterSpace.truncated(d, top)
    code = ManyLetterSpace(dc, sorted(used))
    rows, cols, data = [], [], []
    junk_ops = []
    taken = {r: 0 for r in used}
    assigned = []
    empty_code = code.index(())
    for n in range(top + 1):
        ts = subspaces[n]
        W = _eigen_products(ts.eigenvectors, n)
        Wh = W.conj().T.tocsr()
        off = source.offset(n)
        members = ts.member_indices() if rates[n] is not None else np.zeros(0, dtype=np.int64)
        if rates[n] is not None:
            r = rates[n]
            start = taken[r]
            taken[r] += ts.dim
            targets = code.offset(r) + start + np.arange(ts.dim)
            assigned.extend(targets)
            for i, m in enumerate(members):
                row = Wh[m]
                rows.extend([targets[i]] * row.nnz)
                cols.extend(row.indices + off)
                data.extend(row.data)
        for b in np.setdiff1d(np.arange(d**n), members):
            row = Wh[b]
            junk_ops.append(
                sp.csr_matrix(
                    (row.data, (np.full(row.nnz, empty_code), row.indices + off)),
                    shape=(code.dim, source.dim),
                )
            )
    E_T = sp.csr_matrix((data, (rows, cols)), shape=(code.dim, source.dim))
    encoder = KrausChannel([E_T] + junk_ops, source, code, name=f"generalized-schumacher(delta={delta})")
    unused = np.setdiff1d(np.arange(code.dim), np.asarray(assigned, dtype=np.int64))
    decoder = KrausChannel(
        [E_T.conj().T] + _leak_family(code, unused, source), code, source, name="generalized-schumacher-decoder"
    )
    for ch in (encoder, decoder):
        report = check_kraus(ch)
        if not report.passed:
            raise InvariantError(f"{ch.name} fails the Kraus property (deviation {report.deviation:.3g})")
    return GeneralizedSchumacherCode(subspaces, dc, rates, encoder, decoder, rho)


def typical_probability_table(rho, Ns, delta: float) -> list:
    """``(N, dim V, P_T)`` rows; the empirical stand-in for the limit theorem."""
    rows = []
    for N in Ns:
        ts = quantum_typical_subspace(rho, N, delta)
        rows.append({"N": N, "delta": delta, "dimV": ts.dim, "P_T": ts.total_prob})
    return rows


def schumacher_report(source: CanonicalSource, Ns, delta: float, code_alphabet=2) -> list:
    """Per-``N`` rows of ``dim V, R, P_T, F, I, I_c`` for a letter ensemble."""
    rho = source.letter_matrix()
    rows = []
    for N in Ns:
        code = build_schumacher(rho, N, delta, code_alphabet)
        conf = schumacher_confidence(code, source)
        info = code.information()
        rows.append(
            {
                "N": N,
                "delta": delta,
                "dimV": code.subspace.dim,
                "R": code.rate,
                "R_ideal": code.ideal_rate,
                "P_T": code.subspace.total_prob,
                "F": conf.fidelity,
                "bound": conf.bound,
                **info,
            }
        )
    return rows
