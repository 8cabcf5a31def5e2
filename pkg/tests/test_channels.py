import math

import numpy as np
import pytest
import scipy.sparse as sp

from manyletter import (
    CodePair,
    KrausChannel,
    ManyLetterSpace,
    ManyLetterVector,
    MessageEnsemble,
    apply_channel,
    check_kraus,
    check_unital,
    confidence,
    encoded_information,
    fidelity,
    grand_canonical,
    is_compressive,
    probability_of_error,
)
from manyletter.channels import audit_channel, measured_code_information
from manyletter.exceptions import AlphabetMismatchError, InvariantError


@pytest.fixture
def space():
    return ManyLetterSpace.truncated(2, 2)


def test_identity_channel_is_perfect(space):
    ch = KrausChannel.identity(space)
    assert check_kraus(ch).deviation == 0.0
    assert check_unital(ch).passed
    pair = CodePair(ch, ch)
    phi = ManyLetterVector({(): 0.6, (0, 1): 0.8}, 2)
    assert fidelity(phi, pair) == pytest.approx(1.0)


def test_scaled_identity_deviation(space):
    ch = KrausChannel([0.5 * sp.identity(space.dim)], space, space)
    report = check_kraus(ch)
    assert report.deviation == pytest.approx(0.75)
    assert not report.passed


def test_unnormalized_decoder_is_rejected(space):
    good = KrausChannel.identity(space)
    bad = KrausChannel([0.5 * sp.identity(space.dim)], space, space)
    with pytest.raises(InvariantError):
        CodePair(good, bad)


def test_shape_mismatch():
    a, b = ManyLetterSpace.truncated(2, 1), ManyLetterSpace.truncated(2, 2)
    with pytest.raises(ValueError):
        KrausChannel([sp.identity(a.dim)], a, b)


def test_apply_channel_preserves_trace(space):
    sigma = grand_canonical([0.2, 0.3, 0.5], np.diag([0.7, 0.3]))
    out = apply_channel(KrausChannel.identity(space), sigma)
    assert out.trace() == pytest.approx(1.0)
    with pytest.raises(AlphabetMismatchError):
        apply_channel(KrausChannel.identity(ManyLetterSpace.truncated(3, 1)), sigma)


def test_dephasing_channel_fidelity():
    # measure in the letter basis on one-letter strings
    space = ManyLetterSpace(2, [1])
    P0 = sp.csr_matrix(np.diag([1.0, 0.0]))
    P1 = sp.csr_matrix(np.diag([0.0, 1.0]))
    ch = KrausChannel([P0, P1], space, space)
    pair = CodePair(ch, KrausChannel.identity(space))
    plus = ManyLetterVector({(0,): 1 / math.sqrt(2), (1,): 1 / math.sqrt(2)}, 2)
    zero = ManyLetterVector.basis((0,), 2)
    assert fidelity(plus, pair) == pytest.approx(0.5)
    assert fidelity(zero, pair) == pytest.approx(1.0)
    ens = MessageEnsemble([(0.5, plus), (0.5, zero)])
    assert confidence(ens, pair) == pytest.approx(0.75)
    assert probability_of_error(ens, pair) == pytest.approx(0.25)


def test_encoded_information_and_compressivity(space):
    sigma = grand_canonical([0.2, 0.3, 0.5], np.diag([0.7, 0.3]))
    ch = KrausChannel.identity(space)
    assert encoded_information(ch, sigma) == pytest.approx(1.3)
    assert measured_code_information(ch, sigma) == pytest.approx(1.3)
    assert is_compressive(ch, sigma)
    rows = audit_channel(ch, sigma)
    assert [r["check"] for r in rows][:2] == ["kraus", "unital"]


def test_lossless_pair_completes_decoder():
    src = ManyLetterSpace(2, [0, 1])
    code = ManyLetterSpace(2, [0, 2])
    # |> -> |>, |0> -> |00>, |1> -> |01>; |10> and |11> are unused
    E = sp.csc_matrix(([1.0, 1.0, 1.0], ([0, 1, 2], [0, 1, 2])), shape=(code.dim, src.dim))
    pair = CodePair.lossless(KrausChannel([E], src, code))
    assert len(pair.decoder) == 3
    assert check_kraus(pair.decoder).passed
    phi = ManyLetterVector({(0,): 0.6, (1,): 0.8}, 2)
    assert fidelity(phi, pair) == pytest.approx(1.0)
