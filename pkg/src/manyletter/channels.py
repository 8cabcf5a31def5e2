"""Kraus-represented codes between truncated many-letter spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .core import (
    ManyLetterSpace,
    ManyLetterVector,
    MessageEnsemble,
    MessageMatrix,
    raw_information,
)
from .exceptions import AlphabetMismatchError, InvariantError, TruncationError

KRAUS_TOL = 1e-10


def _embedding(source: ManyLetterSpace, target: ManyLetterSpace) -> sp.csr_matrix:
    """Isometric inclusion of ``source`` into ``target`` (shared sectors)."""
    if source.basis_dim != target.basis_dim:
        raise AlphabetMismatchError(
            f"basis_dim mismatch: {source.basis_dim} vs {target.basis_dim}"
        )
    rows, cols = [], []
    for n in source.lengths:
        if n not in target:
            raise TruncationError(f"sector {n} of {source} is missing from {target}")
        s, t = source.sector_slice(n), target.sector_slice(n)
        cols.append(np.arange(s.start, s.stop))
        rows.append(np.arange(t.start, t.stop))
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    return sp.csr_matrix(
        (np.ones(len(rows), dtype=complex), (rows, cols)), shape=(target.dim, source.dim)
    )


def move_matrix(sigma: MessageMatrix, space: ManyLetterSpace) -> MessageMatrix:
    """Re-express ``sigma`` over ``space``; sectors with weight must exist there."""
    if sigma.space == space:
        return sigma
    used = [n for n in sigma.space.lengths if n not in space]
    for n in used:
        sl = sigma.space.sector_slice(n)
        if sigma.matrix[sl].nnz or sigma.matrix[:, sl].nnz:
            raise TruncationError(f"message has support on length {n}, outside {space}")
    keep = ManyLetterSpace(sigma.space.basis_dim, [n for n in sigma.space.lengths if n in space])
    restrict = _embedding(keep, sigma.space)
    inner = restrict.conj().T @ sigma.matrix @ restrict
    embed = _embedding(keep, space)
    return MessageMatrix(space, embed @ inner @ embed.conj().T, validate=False)


def move_vector(phi: ManyLetterVector, space: ManyLetterSpace) -> np.ndarray:
    return phi.to_array(space)


class KrausChannel:
    """Completely positive map ``sigma -> sum_i E_i sigma E_i^dagger``.

    Operators are sparse matrices of shape ``(code_space.dim,
    source_space.dim)`` stored column-wise, i.e. one sparse code vector per
    source basis string.
    """

    def __init__(
        self,
        operators: Sequence,
        source_space: ManyLetterSpace,
        code_space: ManyLetterSpace,
        name: str = "channel",
    ):
        ops = [sp.csc_matrix(E, dtype=complex) for E in operators]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = (code_space.dim, source_space.dim)
        for E in ops:
            if E.shape != shape:
                raise ValueError(f"Kraus operator has shape {E.shape}, expected {shape}")
        self.operators = ops
        self.source_space = source_space
        self.code_space = code_space
        self.name = name
        self._stacked = None
        self._stacked_adjoint = None

    @classmethod
    def from_columns(
        cls,
        operators: Sequence[Mapping],
        source_space: ManyLetterSpace,
        code_space: ManyLetterSpace,
        name: str = "channel",
    ) -> "KrausChannel":
        """Build operators from ``{source basis string: code ManyLetterVector}`` maps."""
        mats = []
        for columns in operators:
            rows, cols, data = [], [], []
            for key, image in columns.items():
                j = source_space.index(key)
                for ckey, amp in image.amplitudes.items():
                    rows.append(code_space.index(ckey))
                    cols.append(j)
                    data.append(amp)
            mats.append(
                sp.csc_matrix((data, (rows, cols)), shape=(code_space.dim, source_space.dim))
            )
        return cls(mats, source_space, code_space, name)

    @classmethod
    def identity(cls, space: ManyLetterSpace) -> "KrausChannel":
        return cls([sp.identity(space.dim, dtype=complex, format="csc")], space, space, "identity")

    def __len__(self):
        return len(self.operators)

    def adjoint(self, name: str | None = None) -> "KrausChannel":
        return KrausChannel(
            [E.conj().T for E in self.operators],
            self.code_space,
            self.source_space,
            name or f"{self.name}^dagger",
        )

    def stacked(self) -> sp.csr_matrix:
        """All operators stacked vertically, ``[E_1; E_2; ...]``."""
        if self._stacked is None:
            self._stacked = sp.vstack(self.operators, format="csr")
        return self._stacked

    def stacked_adjoint(self) -> sp.csr_matrix:
        """``[E_1^dagger; E_2^dagger; ...]``, shape ``(len * source.dim, code.dim)``."""
        if self._stacked_adjoint is None:
            self._stacked_adjoint = sp.vstack([E.conj().T for E in self.operators], format="csr")
        return self._stacked_adjoint

    def completeness(self) -> sp.csr_matrix:
        """``sum_i E_i^dagger E_i`` on the source space."""
        S = self.stacked()
        return (S.conj().T @ S).tocsr()

    def co_completeness(self) -> sp.csr_matrix:
        """``sum_i E_i E_i^dagger`` on the code space."""
        H = sp.hstack(self.operators, format="csr")
        return (H @ H.conj().T).tocsr()

    def sandwich(self, inner: sp.spmatrix) -> sp.csr_matrix:
        """``sum_i E_i A E_i^dagger`` for a source-space operator ``A``."""
        H = sp.hstack(self.operators, format="csr")
        blocks = sp.kron(sp.identity(len(self), format="csr"), sp.csr_matrix(inner), format="csr")
        return (H @ blocks @ H.conj().T).tocsr()

    def pullback(self, code_op: sp.spmatrix) -> sp.csr_matrix:
        """``sum_i E_i^dagger B E_i`` for a code-space operator ``B``."""
        S = self.stacked()
        blocks = sp.kron(sp.identity(len(self), format="csr"), sp.csr_matrix(code_op), format="csr")
        return (S.conj().T @ blocks @ S).tocsr()

    def apply_vector(self, phi: ManyLetterVector) -> list:
        """``[E_i |phi>]`` as code-space vectors."""
        x = phi.to_array(self.source_space)
        return [ManyLetterVector.from_array(self.code_space, E @ x) for E in self.operators]

    def __repr__(self):
        return (
            f"KrausChannel({self.name!r}, {len(self)} operators, "
            f"source sectors {self.source_space.lengths}, code sectors {self.code_space.lengths})"
        )


@dataclass(frozen=True)
class AuditReport:
    """Outcome of one channel check; ``deviation`` is the max entry error."""

    check: str
    channel: str
    deviation: float
    frobenius: float
    passed: bool
    tolerance: float

    def as_row(self) -> dict:
        return asdict(self)


def _identity_deviation(op: sp.spmatrix) -> tuple:
    diff = (op - sp.identity(op.shape[0], dtype=complex, format="csr")).tocsr()
    diff.eliminate_zeros()
    if diff.nnz == 0:
        return 0.0, 0.0
    return float(abs(diff).max()), float(sp.linalg.norm(diff))


def check_kraus(ch: KrausChannel, tol: float = KRAUS_TOL) -> AuditReport:
    """Deviation of ``sum E^dagger E`` from the identity on the truncated source."""
    dev, fro = _identity_deviation(ch.completeness())
    return AuditReport("kraus", ch.name, dev, fro, dev <= tol, tol)


def check_unital(ch: KrausChannel, tol: float = KRAUS_TOL) -> AuditReport:
    """Deviation of ``sum E E^dagger`` from the identity on the truncated code space."""
    dev, fro = _identity_deviation(ch.co_completeness())
    return AuditReport("unital", ch.name, dev, fro, dev <= tol, tol)


def apply_channel(ch: KrausChannel, sigma: MessageMatrix, tol: float = KRAUS_TOL) -> MessageMatrix:
    """``sigma_C = sum_i E_i sigma E_i^dagger``."""
    if sigma.basis_dim != ch.source_space.basis_dim:
        raise AlphabetMismatchError(
            f"message basis_dim {sigma.basis_dim} vs channel source {ch.source_space.basis_dim}"
        )
    s = move_matrix(sigma, ch.source_space).matrix
    out = ch.sandwich(s)
    result = MessageMatrix(ch.code_space, out, validate=False)
    tr_in, tr_out = sigma.trace(), result.trace()
    if abs(tr_in - tr_out) > tol:
        raise InvariantError(f"trace not preserved: {tr_in!r} -> {tr_out!r}")
    return result


@dataclass
class CodePair:
    """Encoder channel and the decoder channel that inverts it (as far as it can)."""

    encoder: KrausChannel
    decoder: KrausChannel

    def __post_init__(self):
        if self.decoder.source_space != self.encoder.code_space:
            raise AlphabetMismatchError("decoder input space must be the encoder code space")
        if self.decoder.code_space.basis_dim != self.encoder.source_space.basis_dim:
            raise AlphabetMismatchError("decoder output alphabet differs from the source")
        report = check_kraus(self.decoder)
        if not report.passed:
            raise InvariantError(
                f"decoder {self.decoder.name!r} is not complete (deviation {report.deviation:.3g})"
            )

    @classmethod
    def lossless(cls, encoder: KrausChannel) -> "CodePair":
        """Single isometric encoder decoded by its adjoint.

        The adjoint is completed with the projector onto the complement of
        the code image, which maps back to zero only in the source; that
        keeps the decoder trace preserving on the whole code space.
        """
        if len(encoder) != 1:
            raise ValueError("a lossless pair needs a single Kraus operator")
        E = encoder.operators[0]
        image = E @ E.conj().T
        complement = (sp.identity(E.shape[0], dtype=complex, format="csr") - image).tocsr()
        complement.eliminate_zeros()
        ops = [E.conj().T]
        if complement.nnz:
            ops.extend(_leak_operators(complement, encoder.source_space))
        decoder = KrausChannel(ops, encoder.code_space, encoder.source_space, f"{encoder.name}^dagger")
        return cls(encoder, decoder)


def _leak_operators(projector: sp.csr_matrix, target: ManyLetterSpace) -> list:
    """Kraus operators sending the range of ``projector`` to the empty message."""
    if 0 not in target:
        raise TruncationError("completing a decoder needs the empty-message sector")
    empty = target.index(())
    dim = projector.shape[0]
    coo = projector.tocoo()
    if np.all(coo.row == coo.col):
        # range spanned by code basis strings: one operator per string
        strings = coo.row[np.abs(coo.data) > 0.5]
        return [
            sp.csr_matrix(([1.0 + 0j], ([empty], [c])), shape=(target.dim, dim))
            for c in strings
        ]
    dense = projector.toarray()
    w, v = np.linalg.eigh(0.5 * (dense + dense.conj().T))
    return [
        sp.csr_matrix((v[:, j].conj(), (np.full(dim, empty), np.arange(dim))), shape=(target.dim, dim))
        for j in np.flatnonzero(w > 0.5)
    ]


def _fidelities(states: np.ndarray, pair: CodePair) -> np.ndarray:
    """Fidelities of the columns of ``states`` (source-space coordinates).

    With ``b_i = E_i x`` and ``a_j = D_j^dagger x``, ``<x|D_j E_i|x> = a_j^dagger b_i``
    so the double sum is a Frobenius norm of a small matrix per state.
    """
    enc, dec = pair.encoder, pair.decoder
    shared = [n for n in enc.source_space.lengths if n in dec.code_space]
    if not shared:
        return np.zeros(states.shape[1])
    keep = ManyLetterSpace(enc.source_space.basis_dim, shared)
    # components on sectors the decoder cannot emit have no overlap
    move = _embedding(keep, dec.code_space) @ _embedding(keep, enc.source_space).T
    out_states = move @ states
    code_dim = enc.code_space.dim
    B = enc.stacked() @ states  # rows (i, c): b_i = E_i x
    A = dec.stacked_adjoint().conj() @ out_states.conj()  # rows (j, c): conj(a_j)
    out = np.empty(states.shape[1])
    for k in range(states.shape[1]):
        b = B[:, k].reshape(len(enc), code_dim)
        a = A[:, k].reshape(len(dec), code_dim)
        b = b[np.any(b != 0, axis=1)]
        a = a[np.any(a != 0, axis=1)]
        out[k] = float(np.sum(np.abs(a @ b.T) ** 2)) if a.size and b.size else 0.0
    return out


def fidelity(phi: ManyLetterVector, pair: CodePair) -> float:
    """``F(phi) = sum_ij |<phi| D_j E_i |phi>|^2``."""
    if not phi.is_normalized():
        raise InvariantError(f"fidelity needs a normalized message, norm {phi.norm():.15g}")
    x = phi.to_array(pair.encoder.source_space)
    return float(_fidelities(x[:, None], pair)[0])


def confidence(ensemble: MessageEnsemble, pair: CodePair) -> float:
    """Average fidelity ``sum_phi p(phi) F(phi)``."""
    probs = [p for p, _ in ensemble]
    states = np.column_stack([phi.to_array(pair.encoder.source_space) for _, phi in ensemble])
    return math.fsum(p * f for p, f in zip(probs, _fidelities(states, pair)))


def probability_of_error(ensemble: MessageEnsemble, pair: CodePair) -> float:
    return 1.0 - confidence(ensemble, pair)


def pulled_back_lengths(ch: KrausChannel, code_lengths: np.ndarray | None = None) -> sp.csr_matrix:
    """``L_c = sum_i E_i^dagger L_C E_i`` as an operator on the source space."""
    if code_lengths is None:
        code_lengths = ch.code_space.length_diagonal()
    return ch.pullback(sp.diags(np.asarray(code_lengths, dtype=complex), format="csr"))


def encoded_information(
    ch: KrausChannel, sigma: MessageMatrix, code_lengths: np.ndarray | None = None
) -> float:
    """``I_c(sigma) = log2(dim H_C) Tr{sigma L_c}`` in qbits.

    ``code_lengths`` overrides the length assigned to each code basis string
    (used to report a discarded junk codeword as length 0).
    """
    s = move_matrix(sigma, ch.source_space)
    Lc = pulled_back_lengths(ch, code_lengths)
    return math.log2(ch.code_space.basis_dim) * s.expectation_operator(Lc)


def measured_code_information(
    ch: KrausChannel, sigma: MessageMatrix, code_lengths: np.ndarray | None = None
) -> float:
    """Raw information of ``apply_channel(ch, sigma)`` measured in the code space."""
    out = apply_channel(ch, sigma)
    if code_lengths is None:
        return raw_information(out)
    return math.log2(ch.code_space.basis_dim) * out.expectation(code_lengths)


def is_compressive(
    ch: KrausChannel,
    sigma: MessageMatrix,
    tol: float = KRAUS_TOL,
    code_lengths: np.ndarray | None = None,
) -> bool:
    """``I_c(sigma) <= I(sigma)`` up to ``tol``."""
    return encoded_information(ch, sigma, code_lengths) <= raw_information(sigma) + tol


def audit_channel(
    ch: KrausChannel,
    sigma: MessageMatrix | None = None,
    tol: float = KRAUS_TOL,
    code_lengths: np.ndarray | None = None,
) -> list:
    """Kraus, unitality and (given ``sigma``) compressivity records."""
    rows = [check_kraus(ch, tol).as_row(), check_unital(ch, tol).as_row()]
    if sigma is not None:
        I = raw_information(sigma)
        Ic = encoded_information(ch, sigma, code_lengths)
        rows.append(
            {
                "check": "compressive",
                "channel": ch.name,
                "I": I,
                "I_c": Ic,
                "passed": Ic <= I + tol,
                "tolerance": tol,
            }
        )
    return rows
