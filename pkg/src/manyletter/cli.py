"""Command-line experiment driver.

Every subcommand reads optional parameters from ``--config`` (YAML or JSON),
runs one experiment and writes ``report.tsv`` plus ``manifest.json`` into
``--out``. Parameters missing from the config fall back to small defaults,
so each subcommand also runs bare.

Exit status: 0 on success, 2 for bad input, 3 when a size guard or the
truncation is hit, 4 when an invariant check fails, 5 for other library
errors.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from .channels import audit_channel, check_kraus, encoded_information
from .classical import (
    ClassicalEnsemble,
    PrefixCode,
    block_code,
    huffman_build,
    kraft_ok,
    kraft_sum,
    shannon_entropy,
    typical_report,
)
from .core import (
    CanonicalSource,
    ManyLetterSpace,
    ManyLetterVector,
    _check_letter_matrix,
    canonical,
    grand_canonical,
    raw_information,
    von_neumann_entropy,
)
from .exceptions import (
    ConfigError,
    DecodingError,
    GuardError,
    InvariantError,
    ManyLetterError,
    TruncationError,
)
from .io import (
    EXPERIMENTS,
    ExperimentConfig,
    load_config,
    parse_alphabet,
    parse_letter_matrix,
    parse_message_matrix,
    parse_vector,
    rows_to_tsv,
    to_jsonable,
)
from .lossless import (
    CoreInformationObservable,
    build_general_code,
    build_symbol_code,
    compress_grand_canonical,
    core_information,
    decode,
    encode,
    general_report,
)
from .sampling import as_rng, random_message_matrix, random_vector
from .schumacher import build_schumacher, generalized_schumacher, schumacher_report
from .translation import build_translator, message_translator, translation_information_audit

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_INVARIANT = 4
EXIT_OTHER = 5

DEFAULT_RHO = {"diag": [0.9, 0.1]}
DEFAULT_PROBS = [0.9, 0.1]


class Run:
    """Resolved parameters and collected side outputs of one experiment."""

    def __init__(self, config: ExperimentConfig, args):
        self.config = config
        self.args = args
        self.tolerance = args.tolerance
        self.mode = args.mode or config.get("mode", "integer")
        self.lmax = args.lmax if args.lmax is not None else config.get("L_max")
        self.rng = as_rng(args.seed)
        self.extra_files: dict = {}
        self.summary: dict = {}

    def get(self, key, default=None):
        return self.config.get(key, default)

    def rho(self) -> np.ndarray:
        return _check_letter_matrix(parse_letter_matrix(self.get("rho", DEFAULT_RHO)))

    def probs(self) -> np.ndarray:
        p = self.get("probs", DEFAULT_PROBS)
        try:
            return np.asarray(p, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"probs must be a list of numbers, got {p!r}") from exc

    def check(self, condition: bool, message: str) -> None:
        if not condition:
            raise InvariantError(message)


def _ensemble(run: Run) -> ClassicalEnsemble:
    symbols = run.get("symbols")
    return ClassicalEnsemble.from_probs(run.probs(), symbols)


def exp_entropy(run: Run) -> list:
    rho = run.rho()
    S = von_neumann_entropy(rho)
    rows = [{"n": 1, "S": S, "n_S_rho": S}]
    for n in run.get("ns", []):
        Sn = von_neumann_entropy(canonical(rho, int(n)))
        run.check(abs(Sn - n * S) <= 1e-9, f"S(rho^{n}) = {Sn} differs from n S(rho) = {n * S}")
        rows.append({"n": int(n), "S": Sn, "n_S_rho": n * S})
    return rows


def exp_huffman(run: Run) -> list:
    ens = _ensemble(run)
    code = huffman_build(ens)
    H = shannon_entropy(ens.probs)
    L = code.expected_length(ens)
    run.check(code.is_prefix_free(), "Huffman code is not prefix-free")
    run.check(kraft_ok(code, run.tolerance), "Huffman code violates the Kraft inequality")
    run.check(H - run.tolerance <= L < H + 1, f"expected length {L} outside [H, H+1) with H={H}")
    run.summary.update({"H": H, "L_bar": L, "kraft": kraft_sum(code)})
    return [
        {"symbol": s, "prob": float(p), "codeword": code.codewords[s], "length": len(code.codewords[s])}
        for s, p in zip(ens.symbols, ens.probs)
    ]


def exp_kraft(run: Run) -> list:
    words = run.get("codewords")
    if words is None:
        lengths = run.get("lengths", [1, 2, 2])
        total = math.fsum(2.0 ** -float(l) for l in lengths)
        return [{"lengths": json.dumps(list(lengths)), "kraft_sum": total, "kraft_ok": total <= 1 + run.tolerance}]
    if isinstance(words, list):
        words = {i: w for i, w in enumerate(words)}
    code = PrefixCode({k: str(v) for k, v in words.items()})
    return [
        {
            "codewords": json.dumps([code.codewords[k] for k in code.codewords]),
            "kraft_sum": kraft_sum(code),
            "kraft_ok": kraft_ok(code, run.tolerance),
            "prefix_free": code.is_prefix_free(),
        }
    ]


def exp_typical(run: Run) -> list:
    Ns = [int(n) for n in run.get("Ns", [run.get("N")] if "N" in run.config.params else [4, 8, 12, 16])]
    return typical_report(_ensemble(run), Ns, float(run.get("delta", 0.15)))


def exp_block_code(run: Run) -> list:
    ens = _ensemble(run)
    N, delta = int(run.get("N", 4)), float(run.get("delta", 0.3))
    code = block_code(ens, N, delta)
    run.summary.update(
        {"width": code.width, "T": len(code.typical), "P_T": code.typical.total_prob,
         "success_probability": code.success_probability(), "junk": code.junk_bits}
    )
    rows = []
    for block in itertools.product(ens.symbols, repeat=N):
        word = code.encode(block)
        rows.append({"block": "".join(map(str, block)), "typical": not word.is_junk, "codeword": word.bits})
    return rows


def exp_translate(run: Run) -> list:
    dq = parse_alphabet(run.get("source_alphabet", 3)).basis_dim
    dc = parse_alphabet(run.get("code_alphabet", 2)).basis_dim
    rows = []
    for N in [int(n) for n in run.get("Ns", [1, 2, 3])]:
        t = build_translator(dq, dc, N)
        top = int(run.lmax or run.get("max_length", 2 * N))
        top = top // N * N
        report = check_kraus(message_translator(t, top), run.tolerance)
        run.check(report.passed, f"message translator fails the Kraus check ({report.deviation:.3g})")
        space = ManyLetterSpace(dq, range(0, top + 1, N))
        sigma = random_message_matrix(space, min(space.dim, int(run.get("rank", 4))), run.rng)
        audit = translation_information_audit(t, sigma, run.tolerance)
        run.check(audit["I_c"] >= audit["I"] - run.tolerance, "translator compressed the message")
        rows.append({**audit, "ideal_R": t.ideal_rate, "kraus_deviation": report.deviation})
        run.extra_files[f"translator_N{N}.tsv"] = t.table()
    return rows


def _source(run: Run) -> CanonicalSource:
    alphabet = parse_alphabet(run.get("letters", len(run.probs())))
    return CanonicalSource(alphabet, run.probs())


def exp_schumacher(run: Run) -> list:
    source = _source(run)
    Ns = [int(n) for n in run.get("Ns", [run.get("N", 10)])]
    delta = float(run.get("delta", 0.3))
    dc = parse_alphabet(run.get("code_alphabet", 2)).basis_dim
    rows = schumacher_report(source, Ns, delta, dc)
    for row in rows:
        run.check(row["F"] >= row["bound"] - run.tolerance, "confidence below 2 P_T - 1")
    return rows


def exp_schumacher_grand(run: Run) -> list:
    rho = run.rho()
    lambdas = np.asarray(run.get("lambdas", [0.1, 0.2, 0.3, 0.4]), dtype=float)
    delta = float(run.get("delta", 0.6))
    dc = parse_alphabet(run.get("code_alphabet", 2)).basis_dim
    code = generalized_schumacher(lambdas, rho, delta, dc, run.lmax)
    for ch in (code.encoder, code.decoder):
        report = check_kraus(ch, run.tolerance)
        run.check(report.passed, f"{ch.name} fails the Kraus check")
    sigma = grand_canonical(lambdas, rho)
    Ic = encoded_information(code.encoder, sigma)
    predicted = code.predicted_information(lambdas)
    run.check(abs(Ic - predicted) <= 1e-9, f"I_c {Ic} differs from the sector sum {predicted}")
    margin = code.compression_margin()
    run.check(margin >= -run.tolerance, f"encoded information exceeds raw information (margin {margin})")
    run.summary.update({"P_T": code.typical_probability(lambdas), "I": raw_information(sigma),
                        "I_c": Ic, "I_c_ideal": code.ideal_information(lambdas), "margin": margin})
    return [
        {"n": n, "lambda": float(lambdas[n]) if n < len(lambdas) else 0.0, "dimV": code.subspaces[n].dim,
         "P_Tn": code.subspaces[n].total_prob, "rate": code.rates[n]}
        for n in sorted(code.subspaces)
    ]


def exp_lossless_grand(run: Run) -> list:
    rho = run.rho()
    lambdas = np.asarray(run.get("lambdas", [0.0, 0.0, 1.0]), dtype=float)
    top = int(np.flatnonzero(lambdas > 0).max())
    code = build_symbol_code(rho, run.mode, int(run.lmax or top))
    report = check_kraus(code.encoder, run.tolerance)
    run.check(report.passed, "symbol encoder is not an isometry")
    row = compress_grand_canonical(lambdas, rho, code)
    if run.mode == "ideal":
        run.check(abs(row["I_c"] - row["S_letters"]) <= run.tolerance, "ideal I_c differs from sum lambda_n n S(rho)")
    run.extra_files["codebook.tsv"] = rows_to_tsv(
        [{"eigenvalue": float(q), "codeword": c, "length": len(c), "ideal_length": float(l)}
         for q, c, l in zip(code.eigenvalues, code.codewords, code.ideal_lengths)]
    )
    return [row]


def _sigma(run: Run):
    spec = run.get("sigma")
    if spec is not None:
        return parse_message_matrix(spec)
    space = ManyLetterSpace.truncated(int(run.get("basis_dim", 2)), int(run.lmax or run.get("max_length", 2)))
    return random_message_matrix(space, min(space.dim, int(run.get("rank", 3))), run.rng)


def exp_lossless_general(run: Run) -> list:
    sigma = _sigma(run)
    code = build_general_code(sigma, run.mode)
    row = general_report(code, sigma)
    if run.mode == "ideal":
        run.check(abs(row["I_c"] - row["S"]) <= run.tolerance, "ideal I_c differs from S(sigma)")
    else:
        run.check(row["S"] - run.tolerance <= row["I_c"] < row["S"] + 1, "integer I_c outside [S, S+1)")
    phi = random_vector(sigma.space, run.rng)
    back = decode(code, encode(code, phi), run.tolerance)
    run.check(back.allclose(phi, run.tolerance), "lossless round trip failed")
    run.extra_files["codebook.tsv"] = code.codebook()
    return [row]


def exp_core_info(run: Run) -> list:
    sigma = _sigma(run)
    obs = CoreInformationObservable.from_sigma(sigma)
    S = von_neumann_entropy(sigma)
    I0 = core_information(obs, sigma)
    run.check(abs(I0 - S) <= run.tolerance, f"I_0(sigma) = {I0} differs from S(sigma) = {S}")
    rows = [{"target": "sigma", "I0": I0, "S": S}]
    for i, q in enumerate(obs.eigenvalues):
        e = ManyLetterVector.from_array(sigma.space, obs.eigenvectors[:, i], tol=0.0)
        rows.append({"target": f"e{i}", "I0": core_information(obs, e), "S": -math.log2(q)})
    for name, spec in (run.get("vectors") or {}).items():
        v = parse_vector(spec, sigma.space.basis_dim).normalized()
        rows.append({"target": name, "I0": core_information(obs, v), "S": ""})
    return rows


def exp_audit_channel(run: Run) -> list:
    rho = run.rho()
    kind = run.get("code", "all")
    rows = []
    if kind in ("translator", "all"):
        t = build_translator(int(run.get("source_dim", 3)), int(run.get("code_dim", 2)), int(run.get("N", 2)))
        rows += audit_channel(message_translator(t, int(run.lmax or 4) // t.N * t.N), tol=run.tolerance)
    if kind in ("schumacher", "all"):
        code = build_schumacher(rho, int(run.get("N", 6)), float(run.get("delta", 0.3)))
        rows += audit_channel(code.encoder, tol=run.tolerance)[:1]
        rows += audit_channel(code.decoder, tol=run.tolerance)[:1]
    if kind in ("symbol", "all"):
        code = build_symbol_code(rho, run.mode, int(run.lmax or 3))
        rows += audit_channel(code.encoder, tol=run.tolerance)
    if kind in ("general", "all"):
        code = build_general_code(_sigma(run), run.mode)
        rows += audit_channel(code.encoder, tol=run.tolerance)
    if not rows:
        raise ConfigError(f"unknown code kind {kind!r}")
    failed = [r for r in rows if r["check"] == "kraus" and not r["passed"]]
    run.check(not failed, f"Kraus check failed for {[r['channel'] for r in failed]}")
    return rows


RUNNERS = {
    "entropy": exp_entropy,
    "huffman": exp_huffman,
    "kraft": exp_kraft,
    "typical": exp_typical,
    "block-code": exp_block_code,
    "translate": exp_translate,
    "schumacher": exp_schumacher,
    "schumacher-grand": exp_schumacher_grand,
    "lossless-grand": exp_lossless_grand,
    "lossless-general": exp_lossless_general,
    "core-info": exp_core_info,
    "audit-channel": exp_audit_channel,
}
assert set(RUNNERS) == set(EXPERIMENTS)


def _versions() -> dict:
    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"artifact": own, "numpy": np.__version__, "scipy": scipy.__version__}


def run_experiment(config: ExperimentConfig, args) -> tuple:
    """Run one experiment; returns ``(rows, manifest, extra files)``."""
    run = Run(config, args)
    rows = RUNNERS[config.experiment](run)
    manifest = {
        "config": config.echo(),
        "seed": args.seed,
        "mode": run.mode,
        "L_max": run.lmax,
        "tolerance": run.tolerance,
        "versions": _versions(),
        "summary": run.summary,
        "files": ["report.tsv", "manifest.json", *sorted(run.extra_files)],
    }
    return rows, manifest, run.extra_files


def write_outputs(out: Path, rows: list, manifest: dict, extra: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.tsv").write_text(rows_to_tsv([to_jsonable(r) for r in rows]))
    (out / "manifest.json").write_text(json.dumps(to_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    for name, text in extra.items():
        (out / name).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manyletter", description="Many-letter quantum coding experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML or JSON experiment config")
    common.add_argument("--out", type=Path, default=None, help="output directory (default: print the report)")
    common.add_argument("--seed", type=int, default=0, help="seed for random ensembles")
    common.add_argument("--lmax", type=int, default=None, help="maximal string length L_max")
    common.add_argument("--mode", choices=("integer", "ideal"), default=None, help="codeword length accounting")
    common.add_argument("--tolerance", type=float, default=1e-10, help="tolerance for invariant checks")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common], help=f"run the {name} experiment")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            config = load_config(args.config, args.experiment)
        else:
            config = ExperimentConfig(args.experiment)
        rows, manifest, extra = run_experiment(config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GuardError, TruncationError) as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvariantError, DecodingError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ManyLetterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except ValueError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        sys.stdout.write(rows_to_tsv([to_jsonable(r) for r in rows]))
    else:
        write_outputs(args.out, rows, manifest, extra)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
