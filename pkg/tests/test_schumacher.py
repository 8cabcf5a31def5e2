import math

import numpy as np
import pytest

from manyletter import (
    CanonicalSource,
    QuantumAlphabet,
    build_schumacher,
    check_kraus,
    confidence,
    encoded_information,
    generalized_schumacher,
    grand_canonical,
    quantum_typical_subspace,
    raw_information,
    schumacher_confidence,
)
from manyletter.exceptions import GuardError, InvariantError
from manyletter.schumacher import schumacher_report, typical_probability_table

from oracles import dense_projector, schumacher_closed_form, typical_strings

P_T_10 = 0.387420489  # 10 * 0.9^9 * 0.1


def test_typical_subspace_reference():
    ts = quantum_typical_subspace(np.diag([0.9, 0.1]), 10, 0.3)
    assert ts.dim == 10
    assert ts.total_prob == pytest.approx(P_T_10, abs=1e-12)
    assert set(ts.members) == typical_strings([0.9, 0.1], 10, 0.3)


def test_typical_subspace_nondiagonal_projector():
    rho = np.array([[0.95, 0.05], [0.05, 0.05]])
    ts = quantum_typical_subspace(rho, 4, 0.4)
    P = ts.projector().toarray()
    assert np.allclose(P, dense_projector(rho, 4, 0.4), atol=1e-12)
    assert np.allclose(P @ P, P, atol=1e-12)


def test_typical_subspace_guard():
    with pytest.raises(GuardError):
        quantum_typical_subspace(np.eye(2) / 2, 40, 0.1)


def test_empty_block_is_typical():
    ts = quantum_typical_subspace(np.diag([0.9, 0.1]), 0, 0.1)
    assert ts.members == ((),) and ts.total_prob == 1.0


def test_build_schumacher_reference():
    code = build_schumacher(np.diag([0.9, 0.1]), 10, 0.3)
    assert code.rate == 4
    assert code.junk_codeword == (1, 0, 1, 0)
    assert check_kraus(code.encoder).passed and check_kraus(code.decoder).passed
    info = code.information()
    assert info["I"] == pytest.approx(10.0)
    assert info["I_c"] == pytest.approx(4 * P_T_10, abs=1e-10)
    assert info["I_c_physical"] == pytest.approx(4.0, abs=1e-10)
    assert info["I_c_ideal"] == pytest.approx(math.log2(10) * P_T_10, abs=1e-10)


def test_classical_source_confidence_equals_P_T():
    rho = np.diag([0.9, 0.1])
    code = build_schumacher(rho, 6, 0.3)
    source = CanonicalSource(QuantumAlphabet.standard(2), [0.9, 0.1])
    conf = schumacher_confidence(code, source)
    # orthogonal letters: typical strings survive, the rest are lost
    assert conf.fidelity == pytest.approx(conf.P_T, abs=1e-12)


def test_nonorthogonal_confidence_two_ways():
    s = 1 / math.sqrt(2)
    alph = QuantumAlphabet([[1, 0], [s, s]])
    source = CanonicalSource(alph, [0.6, 0.4])
    rho = source.letter_matrix()
    code = build_schumacher(rho, 4, 0.3)
    closed = schumacher_confidence(code, source)
    kraus = confidence(source.canonical_ensemble(4), code.pair)
    assert closed.fidelity == pytest.approx(kraus, abs=1e-10)
    oracle = schumacher_closed_form(alph.letter_coordinates, source.probs, rho, 4, 0.3)
    assert closed.fidelity == pytest.approx(oracle, abs=1e-10)
    assert closed.fidelity >= closed.bound - 1e-10


def test_confidence_checks_the_ensemble():
    code = build_schumacher(np.diag([0.9, 0.1]), 4, 0.3)
    with pytest.raises(InvariantError):
        schumacher_confidence(code, CanonicalSource(QuantumAlphabet.standard(2), [0.5, 0.5]))


def test_schumacher_report_rows():
    source = CanonicalSource(QuantumAlphabet.standard(2), [0.9, 0.1])
    (row,) = schumacher_report(source, [10], 0.3)
    assert row["dimV"] == 10 and row["R"] == 4
    assert row["P_T"] == pytest.approx(0.3874, abs=1e-4)


def test_typical_probability_table_trend_values():
    rows = typical_probability_table(np.diag([0.9, 0.1]), [4, 8, 12, 16], 0.15)
    assert [r["dimV"] for r in rows] == [0, 8, 12, 136]


def test_generalized_single_length_matches_block_code():
    rho = np.diag([0.9, 0.1])
    lambdas = np.zeros(11)
    lambdas[10] = 1.0
    code = generalized_schumacher(lambdas, rho, 0.3)
    assert code.rates[10] == 4
    sigma = grand_canonical(lambdas, rho)
    assert encoded_information(code.encoder, sigma) == pytest.approx(4 * P_T_10, abs=1e-10)
    assert code.compression_margin() >= -1e-10


def test_generalized_grand_canonical():
    rho = np.diag([0.8, 0.2])
    lambdas = [0.1, 0.2, 0.3, 0.4]
    code = generalized_schumacher(lambdas, rho, 0.6)
    for ch in (code.encoder, code.decoder):
        assert check_kraus(ch).passed
    sigma = grand_canonical(lambdas, rho)
    Ic = encoded_information(code.encoder, sigma)
    assert Ic == pytest.approx(code.predicted_information(lambdas), abs=1e-10)
    assert Ic <= raw_information(sigma) + 1e-10
    assert code.compression_margin() >= -1e-10


def test_generalized_maximally_mixed_is_not_compressed():
    lambdas = [0.1, 0.2, 0.3, 0.4]
    code = generalized_schumacher(lambdas, np.eye(2) / 2, 0.1)
    sigma = grand_canonical(lambdas, np.eye(2) / 2)
    assert encoded_information(code.encoder, sigma) == pytest.approx(raw_information(sigma), abs=1e-10)
    assert code.typical_probability(lambdas) == pytest.approx(1.0)
