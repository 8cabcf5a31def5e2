"""Estimator-style wrappers around the codes.

Each coder is fit on the statistics it compresses (a probability vector, a
letter matrix or a message matrix) and then encodes with ``transform`` and
decodes with ``inverse_transform``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .channels import apply_channel, confidence
from .classical import ClassicalEnsemble, huffman_build, symbol_decode, symbol_encode
from .core import (
    CanonicalSource,
    MessageEnsemble,
    MessageMatrix,
    ensemble_to_matrix,
)
from .lossless import (
    CoreInformationObservable,
    build_general_code,
    build_symbol_code,
    core_information,
    decode,
    encode,
    encoded_information_general,
)
from .schumacher import build_schumacher, schumacher_confidence


class HuffmanCoder(TransformerMixin, BaseEstimator):
    """Binary Huffman code for a symbol distribution.

    ``fit`` takes a probability vector; ``transform`` maps symbol sequences to
    bit strings and ``inverse_transform`` maps them back.
    """

    def fit(self, X, y=None):
        self.ensemble_ = ClassicalEnsemble.from_probs(np.asarray(X, dtype=float))
        self.code_ = huffman_build(self.ensemble_)
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        return [symbol_encode(self.code_, list(seq)) for seq in X]

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        return [symbol_decode(self.code_, bits) for bits in X]

    def expected_length(self) -> float:
        check_is_fitted(self, "code_")
        return self.code_.expected_length(self.ensemble_)


class _VectorCoder(TransformerMixin, BaseEstimator):
    """Shared encode/decode plumbing for the single-operator codes."""

    def transform(self, X):
        check_is_fitted(self, "code_")
        return [encode(self.code_, phi) for phi in X]

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        return [decode(self.code_, psi, self.tolerance) for psi in X]


class SymbolCompressor(_VectorCoder):
    """Letter-wise Huffman code on the eigenletters of a letter matrix ``rho``."""

    def __init__(self, mode: str = "integer", max_length: int = 4, tolerance: float = 1e-10):
        self.mode = mode
        self.max_length = max_length
        self.tolerance = tolerance

    def fit(self, X, y=None):
        self.code_ = build_symbol_code(np.asarray(X), self.mode, self.max_length)
        return self


class LosslessCompressor(_VectorCoder):
    """Eigenbasis Huffman code for a message matrix ``sigma``."""

    def __init__(self, mode: str = "integer", cutoff: float = 1e-12, tolerance: float = 1e-10):
        self.mode = mode
        self.cutoff = cutoff
        self.tolerance = tolerance

    def fit(self, X: MessageMatrix, y=None):
        if not isinstance(X, MessageMatrix):
            raise TypeError("LosslessCompressor is fit on a MessageMatrix")
        self.code_ = build_general_code(X, self.mode, self.cutoff)
        self.core_ = CoreInformationObservable.from_sigma(X, self.cutoff)
        return self

    def encoded_information(self, sigma: MessageMatrix) -> float:
        check_is_fitted(self, "code_")
        return encoded_information_general(self.code_, sigma)

    def core_information(self, x) -> float:
        check_is_fitted(self, "core_")
        return core_information(self.core_, x)


class SchumacherCompressor(TransformerMixin, BaseEstimator):
    """Block Schumacher code, fit on a letter matrix.

    The code is lossy, so ``transform`` returns the encoded message matrix of
    each input vector and ``inverse_transform`` the decoded one.
    """

    def __init__(self, N: int = 8, delta: float = 0.1, code_dim: int = 2):
        self.N = N
        self.delta = delta
        self.code_dim = code_dim

    def fit(self, X, y=None):
        self.code_ = build_schumacher(np.asarray(X), self.N, self.delta, self.code_dim)
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        space = self.code_.encoder.source_space
        return [
            apply_channel(self.code_.encoder, ensemble_to_matrix(MessageEnsemble([(1.0, phi)]), space))
            for phi in X
        ]

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        return [apply_channel(self.code_.decoder, sigma) for sigma in X]

    def score(self, X, y=None) -> float:
        """Confidence on a :class:`CanonicalSource` or a message ensemble."""
        check_is_fitted(self, "code_")
        if isinstance(X, CanonicalSource):
            return schumacher_confidence(self.code_, X).fidelity
        return confidence(X, self.code_.pair)

    def information(self) -> dict:
        check_is_fitted(self, "code_")
        return self.code_.information()
