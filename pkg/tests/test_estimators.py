import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from manyletter import (
    CanonicalSource,
    HuffmanCoder,
    LosslessCompressor,
    ManyLetterSpace,
    QuantumAlphabet,
    SchumacherCompressor,
    SymbolCompressor,
    von_neumann_entropy,
)
from manyletter.sampling import random_message_matrix, random_vector


def test_huffman_coder_round_trip():
    coder = HuffmanCoder().fit([0.5, 0.25, 0.25])
    bits = coder.transform([[0, 1, 2], [2, 2]])
    assert bits == ["01011", "1111"]
    assert coder.inverse_transform(bits) == [[0, 1, 2], [2, 2]]
    assert coder.expected_length() == pytest.approx(1.5)


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        HuffmanCoder().transform([[0]])
    with pytest.raises(NotFittedError):
        SchumacherCompressor().information()


def test_params_and_clone():
    est = LosslessCompressor(mode="ideal", cutoff=1e-9)
    assert est.get_params() == {"mode": "ideal", "cutoff": 1e-9, "tolerance": 1e-10}
    assert clone(est).get_params() == est.get_params()
    est.set_params(mode="integer")
    assert est.mode == "integer"


def test_symbol_compressor_round_trip():
    est = SymbolCompressor(max_length=2).fit(np.diag([0.6, 0.4]))
    phis = [random_vector(est.code_.source_space, seed=s) for s in range(3)]
    back = est.inverse_transform(est.transform(phis))
    assert all(b.allclose(p, 1e-10) for b, p in zip(back, phis))


def test_lossless_compressor_information():
    space = ManyLetterSpace.truncated(2, 2)
    sigma = random_message_matrix(space, 3, seed=11)
    est = LosslessCompressor(mode="ideal").fit(sigma)
    S = von_neumann_entropy(sigma)
    assert est.encoded_information(sigma) == pytest.approx(S, abs=1e-10)
    assert est.core_information(sigma) == pytest.approx(S, abs=1e-10)
    with pytest.raises(TypeError):
        LosslessCompressor().fit(np.eye(2))


def test_schumacher_compressor_score():
    est = SchumacherCompressor(N=6, delta=0.3).fit(np.diag([0.9, 0.1]))
    source = CanonicalSource(QuantumAlphabet.standard(2), [0.9, 0.1])
    score = est.score(source)
    assert score == pytest.approx(est.code_.subspace.total_prob)
    assert score == pytest.approx(est.score(source.canonical_ensemble(6)), abs=1e-10)
    enc = est.transform([source.alphabet.string((0,) * 6)])
    dec = est.inverse_transform(enc)
    assert dec[0].trace() == pytest.approx(1.0)
    assert est.information()["I"] == pytest.approx(6.0)
