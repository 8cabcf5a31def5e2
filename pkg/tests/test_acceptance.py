"""Acceptance criteria 1-10, one check per criterion.

Each ``criterion_*`` function returns ``(passed, detail)``. Under pytest every
criterion is a test and a PASS/FAIL line per criterion is printed in the
terminal summary; run as a script it prints the same lines and exits nonzero
if any criterion fails.
"""
from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest
import scipy.sparse as sp

from manyletter import (
    CanonicalSource,
    ClassicalEnsemble,
    CoreInformationObservable,
    ManyLetterSpace,
    ManyLetterVector,
    MessageMatrix,
    QuantumAlphabet,
    build_general_code,
    build_schumacher,
    build_symbol_code,
    build_translator,
    canonical,
    check_kraus,
    compress_grand_canonical,
    confidence,
    core_information,
    decode,
    encode,
    encoded_information_general,
    generalized_schumacher,
    huffman_build,
    kraft_sum,
    message_translator,
    quantum_typical_subspace,
    schumacher_confidence,
    shannon_entropy,
    von_neumann_entropy,
)
from manyletter.sampling import (
    random_letter_matrix,
    random_message_matrix,
    random_probs,
    random_unitary,
    random_vector,
)
from manyletter.translation import translation_information_audit

try:
    from oracles import optimal_prefix_length, schumacher_closed_form, typical_strings
except ImportError:  # run as a script from elsewhere
    sys.path.insert(0, __file__.rsplit("/", 1)[0])
    from oracles import optimal_prefix_length, schumacher_closed_form, typical_strings

RESULTS: dict = {}


def criterion_1():
    """Entropy identities."""
    start = time.perf_counter()
    S_half = von_neumann_entropy(np.diag([0.5, 0.5]))
    rho = np.diag([0.9, 0.1])
    S = von_neumann_entropy(rho)
    worst = max(abs(von_neumann_entropy(canonical(rho, n)) - n * S) for n in range(1, 9))
    elapsed = time.perf_counter() - start
    ok = abs(S_half - 1.0) <= 1e-12 and worst <= 1e-9 and elapsed < 1.0
    return ok, f"|S(I/2)-1|={abs(S_half - 1.0):.1e} max|S(rho^n)-nS|={worst:.1e} t={elapsed:.2f}s"


def criterion_2():
    """Huffman sandwich, Kraft, prefix-freeness, exhaustive optimality."""
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    failures, optimal_checks = 0, 0
    for _ in range(200):
        k = int(rng.integers(2, 33))
        probs = random_probs(k, rng, min_prob=1e-9)
        ens = ClassicalEnsemble.from_probs(probs)
        code = huffman_build(ens)
        H, L = shannon_entropy(probs), code.expected_length(ens)
        if not (H - 1e-12 <= L < H + 1 and kraft_sum(code) <= 1 + 1e-12 and code.is_prefix_free()):
            failures += 1
    for _ in range(60):
        k = int(rng.integers(2, 5))
        probs = random_probs(k, rng, min_prob=1e-9)
        ens = ClassicalEnsemble.from_probs(probs)
        optimal_checks += 1
        if abs(huffman_build(ens).expected_length(ens) - optimal_prefix_length(list(probs))) > 1e-12:
            failures += 1
    elapsed = time.perf_counter() - start
    return failures == 0 and elapsed < 30, f"failures={failures} exhaustive={optimal_checks} t={elapsed:.2f}s"


def _eigen_string_set(values, words):
    return {tuple(round(float(values[i]), 12) for i in w) for w in words}


def criterion_3():
    """Typical subspace equals brute-force enumeration; reference values."""
    start = time.perf_counter()
    rhos = [np.diag([0.9, 0.1]), np.array([[0.95, 0.05], [0.05, 0.05]])]
    rhos += [random_letter_matrix(2, seed) for seed in (31, 32)]
    mismatches, checked = 0, 0
    for rho in rhos:
        w = np.linalg.eigvalsh(rho)
        for N in range(1, 13):
            for delta in (0.05, 0.15, 0.3):
                ts = quantum_typical_subspace(rho, N, delta)
                got = _eigen_string_set(ts.eigenvalues, ts.members)
                want = _eigen_string_set(w, typical_strings(list(w), N, delta))
                checked += 1
                mismatches += got != want
    ref = quantum_typical_subspace(np.diag([0.9, 0.1]), 10, 0.3)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and ref.dim == 10 and abs(ref.total_prob - 0.3874) <= 1e-4 and elapsed < 10
    return ok, f"sets={checked} mismatches={mismatches} |T|={ref.dim} P_T={ref.total_prob:.6f} t={elapsed:.2f}s"


def _schumacher_configs():
    s = 1 / math.sqrt(2)
    c, d = math.cos(0.3), math.sin(0.3)
    alphabets = [
        (QuantumAlphabet.standard(2), [0.9, 0.1]),
        (QuantumAlphabet.standard(2), [0.7, 0.3]),
        (QuantumAlphabet([[1, 0], [s, s]]), [0.6, 0.4]),
        (QuantumAlphabet([[1, 0], [c, d]]), [0.5, 0.5]),
        (QuantumAlphabet([[1, 0], [0, 1], [s, s]]), [0.5, 0.3, 0.2]),
    ]
    for seed in (1, 2):
        U = random_unitary(2, seed)
        alphabets.append((QuantumAlphabet([U[:, 0], (U[:, 0] + U[:, 1]) * s]), [0.55, 0.45]))
    for alphabet, probs in alphabets:
        for N, delta in ((3, 0.2), (4, 0.3), (5, 0.4)):
            yield CanonicalSource(alphabet, probs), N, delta


def criterion_4():
    """Schumacher bound, closed form against the Kraus double sum."""
    worst_gap, worst_bound, count = 0.0, np.inf, 0
    for source, N, delta in _schumacher_configs():
        rho = source.letter_matrix()
        code = build_schumacher(rho, N, delta)
        closed = schumacher_confidence(code, source)
        kraus = confidence(source.canonical_ensemble(N), code.pair)
        oracle = schumacher_closed_form(source.alphabet.letter_coordinates, source.probs, rho, N, delta)
        worst_gap = max(worst_gap, abs(closed.fidelity - kraus), abs(closed.fidelity - oracle))
        worst_bound = min(worst_bound, closed.fidelity - closed.bound)
        count += 1
    ok = count >= 20 and worst_gap <= 1e-10 and worst_bound >= -1e-10
    return ok, f"configs={count} max|F_closed-F_kraus|={worst_gap:.1e} min(F-(2P_T-1))={worst_bound:.4f}"


def criterion_5():
    """Kraus completeness of every constructed code."""
    channels = []
    for dq, dc, N in ((3, 2, 1), (3, 2, 2), (2, 3, 3), (4, 2, 1)):
        t = build_translator(dq, dc, N)
        channels.append(message_translator(t, 2 * N))
    for rho, N, delta in ((np.diag([0.9, 0.1]), 10, 0.3), (np.array([[0.95, 0.05], [0.05, 0.05]]), 6, 0.2),
                          (random_letter_matrix(3, 5), 4, 0.3)):
        code = build_schumacher(rho, N, delta)
        channels += [code.encoder, code.decoder]
    gen = generalized_schumacher([0.1, 0.2, 0.3, 0.4], np.diag([0.8, 0.2]), 0.6)
    channels += [gen.encoder, gen.decoder]
    for rho in (np.diag([0.9, 0.1]), random_letter_matrix(3, 6)):
        code = build_symbol_code(rho, "integer", 3)
        channels += [code.encoder, code.pair.decoder]
    for seed, rank in ((1, 1), (2, 3), (3, 6)):
        code = build_general_code(random_message_matrix(ManyLetterSpace.truncated(2, 2), rank, seed))
        channels += [code.encoder, code.pair.decoder]
    worst = max(check_kraus(ch).deviation for ch in channels)
    return worst <= 1e-10, f"channels={len(channels)} max deviation={worst:.1e}"


def criterion_6():
    """Translation never compresses; equality exactly at the rate bound."""
    rng = np.random.default_rng(6)
    bad, count = 0, 0
    for dq, dc, N in ((4, 2, 1), (3, 2, 2), (2, 3, 3)):
        t = build_translator(dq, dc, N)
        tight = abs(t.M * math.log2(dc) - N * math.log2(dq)) <= 1e-12
        space = ManyLetterSpace(dq, range(0, 2 * N + 1, N))
        for _ in range(50):
            sigma = random_message_matrix(space, int(rng.integers(1, min(space.dim, 6) + 1)), rng)
            audit = translation_information_audit(t, sigma)
            gap = audit["I_c"] - audit["I"]
            equal = abs(gap) <= 1e-10
            if gap < -1e-10 or equal != tight:
                bad += 1
            count += 1
    return bad == 0, f"sigmas={count} violations={bad}"


def _eigen_superposition(code, rng):
    """Random superposition of eigen-codewords with distinct codeword lengths."""
    lengths = [len(c) for c in code.codewords]
    picks = [lengths.index(l) for l in sorted(set(lengths))]
    coeff = rng.normal(size=len(picks)) + 1j * rng.normal(size=len(picks))
    arr = code.eigenvectors[:, picks] @ (coeff / np.linalg.norm(coeff))
    return ManyLetterVector.from_array(code.source_space, arr)


def criterion_7():
    """Lossless round trip for symbol and general codes."""
    rng = np.random.default_rng(7)
    codes = [build_symbol_code(np.diag([0.6, 0.3, 0.1]), "integer", 3),
             build_symbol_code(random_letter_matrix(2, 8), "integer", 4)]
    for seed, rank in ((1, 3), (2, 5)):
        codes.append(build_general_code(random_message_matrix(ManyLetterSpace.truncated(2, 2), rank, seed)))
    worst, outside, mixed = 1.0, 0, 0
    for code in codes:
        general = hasattr(code, "support_projector")
        P = code.support_projector() if general else None
        for i in range(100):
            if general and i % 2:
                phi = _eigen_superposition(code, rng)
                mixed += 1
            else:
                phi = random_vector(code.source_space, rng)
            if general:
                x = phi.to_array(code.source_space)
                outside += np.linalg.norm(x - P @ x) > 1e-6
            back = decode(code, encode(code, phi))
            worst = min(worst, abs(np.vdot(phi.to_array(code.source_space), back.to_array(code.source_space))) ** 2)
    return worst >= 1 - 1e-10, f"codes={len(codes)} min fidelity={worst:.12f} outside={outside} mixed-length={mixed}"


def criterion_8():
    """Ideal I_c = S, integer sandwich, canonical N S(rho)."""
    rng = np.random.default_rng(8)
    ideal_gap, sandwich_bad = 0.0, 0
    for i in range(20):
        space = ManyLetterSpace.truncated(2, 2 if i % 2 else 3)
        sigma = random_message_matrix(space, int(rng.integers(1, 9)), rng)
        S = von_neumann_entropy(sigma)
        ideal_gap = max(ideal_gap, abs(encoded_information_general(build_general_code(sigma, "ideal"), sigma) - S))
        Ic = encoded_information_general(build_general_code(sigma, "integer"), sigma)
        sandwich_bad += not (S - 1e-10 <= Ic < S + 1)
    canon_gap = 0.0
    for N in range(1, 7):
        rho = random_letter_matrix(2, 100 + N)
        lambdas = np.zeros(N + 1)
        lambdas[N] = 1.0
        row = compress_grand_canonical(lambdas, rho, mode="ideal")
        canon_gap = max(canon_gap, abs(row["I_c"] - N * von_neumann_entropy(rho)))
    ok = ideal_gap <= 1e-10 and sandwich_bad == 0 and canon_gap <= 1e-9
    return ok, f"max|I_c-S|={ideal_gap:.1e} sandwich failures={sandwich_bad} max|I_c-NS|={canon_gap:.1e}"


def criterion_9():
    """Core information: I0(sigma) = S, I0(e_i) = -log q_i, rotation invariance."""
    rng = np.random.default_rng(9)
    trace_gap, eig_gap = 0.0, 0.0
    for seed in range(5):
        sigma = random_message_matrix(ManyLetterSpace.truncated(2, 2), 4, seed)
        obs = CoreInformationObservable.from_sigma(sigma)
        trace_gap = max(trace_gap, abs(core_information(obs, sigma) - von_neumann_entropy(sigma)))
        for i, q in enumerate(obs.eigenvalues):
            e = ManyLetterVector.from_array(sigma.space, obs.eigenvectors[:, i])
            eig_gap = max(eig_gap, abs(core_information(obs, e) + math.log2(q)))
    # degenerate spectrum: rho = I/2 makes each length sector a degenerate eigenspace
    sigma = canonical(np.eye(2) / 2, 2)
    obs = CoreInformationObservable.from_sigma(sigma)
    q, V = obs.eigenvalues, obs.eigenvectors
    rotated = V @ random_unitary(V.shape[1], rng)
    obs_rot = CoreInformationObservable.from_spectrum(sigma.space, q, rotated)
    rot_gap = abs(core_information(obs, sigma) - core_information(obs_rot, sigma))
    # two degenerate pairs spread over all length sectors
    space = ManyLetterSpace.truncated(2, 2)
    W = random_unitary(space.dim, rng)
    q2 = np.array([0.3, 0.3, 0.2, 0.2])
    sigma2 = MessageMatrix(space, sp.csr_matrix((W[:, :4] * q2) @ W[:, :4].conj().T))
    obs2 = CoreInformationObservable.from_sigma(sigma2)
    R = np.zeros((4, 4), dtype=complex)
    R[:2, :2] = random_unitary(2, rng)
    R[2:, 2:] = random_unitary(2, rng)
    obs2_rot = CoreInformationObservable.from_spectrum(space, q2, W[:, :4] @ R)
    rot_gap = max(rot_gap, abs(core_information(obs2, sigma2) - core_information(obs2_rot, sigma2)))
    for _ in range(10):
        x = random_vector(space, rng)
        rot_gap = max(rot_gap, abs(core_information(obs2, x) - core_information(obs2_rot, x)))
    ok = trace_gap <= 1e-10 and eig_gap <= 1e-10 and rot_gap <= 1e-9
    return ok, f"max|I0-S|={trace_gap:.1e} max|I0(e)+log q|={eig_gap:.1e} rotation={rot_gap:.1e}"


def criterion_10():
    """P_T strictly increasing along N = 4, 8, 12, 16 for p = (0.9, 0.1), delta = 0.15."""
    start = time.perf_counter()
    rho = np.diag([0.9, 0.1])
    values = [quantum_typical_subspace(rho, N, 0.15).total_prob for N in (4, 8, 12, 16)]
    elapsed = time.perf_counter() - start
    increasing = all(b > a for a, b in zip(values, values[1:]))
    detail = "P_T=" + ", ".join(f"{v:.5f}" for v in values) + f" t={elapsed:.2f}s"
    return increasing and elapsed < 60, detail


CRITERIA = [
    (1, "entropy identities", criterion_1),
    (2, "Huffman optimality sandwich", criterion_2),
    (3, "typical-set oracle equivalence", criterion_3),
    (4, "Schumacher bound, two-way confidence", criterion_4),
    (5, "Kraus/isometry audits", criterion_5),
    (6, "translation non-compressivity", criterion_6),
    (7, "lossless round trip", criterion_7),
    (8, "optimal lossless compression identity", criterion_8),
    (9, "core information", criterion_9),
    (10, "asymptotic P_T trend", criterion_10),
]


def _line(number: int, label: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {label:<40} {detail}"


@pytest.mark.parametrize("number,label,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, label, check):
    ok, detail = check()
    line = _line(number, label, ok, detail)
    RESULTS[number] = line
    print(line)
    assert ok, line


def main() -> int:
    failed = 0
    for number, label, check in CRITERIA:
        ok, detail = check()
        failed += not ok
        print(_line(number, label, ok, detail))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
