import json

import numpy as np
import pytest
import yaml

from manyletter import cli
from manyletter.exceptions import ConfigError
from manyletter.io import (
    EXPERIMENTS,
    ExperimentConfig,
    load_config,
    parse_alphabet,
    parse_complex,
    parse_letter_matrix,
    parse_message_matrix,
    parse_vector,
    rows_to_tsv,
)


def read_report(path):
    lines = (path / "report.tsv").read_text().strip().splitlines()
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


def write_config(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def test_parsers():
    assert parse_complex([1, 2]) == 1 + 2j
    assert parse_complex("0.5-1j") == 0.5 - 1j
    assert np.allclose(parse_letter_matrix({"diag": [0.9, 0.1]}), np.diag([0.9, 0.1]))
    assert parse_alphabet(3).basis_dim == 3
    v = parse_vector({"": 0.6, "01": 0.8}, 2)
    assert v.lengths == [0, 2]
    sigma = parse_message_matrix({"basis_dim": 2, "max_length": 1, "matrix": np.diag([0.5, 0.25, 0.25]).tolist()})
    assert sigma.trace() == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        parse_message_matrix({"matrix": [[1]]})
    with pytest.raises(ConfigError):
        parse_letter_matrix({"rows": [[1]]})


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        ExperimentConfig("nope")


def test_load_config_resolves_files(tmp_path):
    (tmp_path / "rho.yaml").write_text(yaml.safe_dump({"diag": [0.5, 0.5]}))
    path = write_config(tmp_path, {"experiment": "entropy", "rho_file": "rho.yaml"})
    cfg = load_config(path)
    assert cfg.params["rho"] == {"diag": [0.5, 0.5]}
    bad = write_config(tmp_path, {"experiment": "entropy", "rho_file": "missing.yaml"}, "bad.yaml")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(path, "huffman")


def test_rows_to_tsv():
    text = rows_to_tsv([{"a": 1, "b": True}, {"a": 0.5, "b": False}])
    assert text.splitlines()[0] == "a\tb"


def test_subcommand_set_is_exact():
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.dest == "experiment")
    assert set(sub.choices) == set(EXPERIMENTS) == {
        "entropy", "huffman", "kraft", "typical", "block-code", "translate", "schumacher",
        "schumacher-grand", "lossless-grand", "lossless-general", "core-info", "audit-channel",
    }


def test_entropy_example(tmp_path):
    assert cli.main(["entropy", "--out", str(tmp_path)]) == 0
    (row,) = read_report(tmp_path)
    assert float(row["S"]) == pytest.approx(0.468996, abs=1e-6)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["tolerance"] == 1e-10 and manifest["seed"] == 0


def test_schumacher_example(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "schumacher", "N": 10, "delta": 0.3, "probs": [0.9, 0.1]})
    assert cli.main(["schumacher", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    (row,) = read_report(tmp_path / "out")
    assert int(row["dimV"]) == 10 and int(row["R"]) == 4
    assert float(row["P_T"]) == pytest.approx(0.3874, abs=1e-4)


def test_lossless_pure_sigma_ideal(tmp_path):
    s = 2**-0.5
    sigma = {"basis_dim": 2, "ensemble": [[1.0, {"0": s, "11": s}]]}
    cfg = write_config(tmp_path, {"experiment": "lossless-general", "sigma": sigma})
    out = tmp_path / "out"
    assert cli.main(["lossless-general", "--config", str(cfg), "--mode", "ideal", "--out", str(out)]) == 0
    (row,) = read_report(out)
    assert float(row["I_c"]) == pytest.approx(0.0, abs=1e-12)
    assert (out / "codebook.tsv").exists()


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_every_subcommand_runs_and_is_deterministic(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main([name, "--out", str(a), "--seed", "3"]) == 0
    assert cli.main([name, "--out", str(b), "--seed", "3"]) == 0
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_stdout_report(capsys):
    assert cli.main(["huffman"]) == 0
    assert capsys.readouterr().out.startswith("symbol\t")


def test_exit_codes(tmp_path):
    missing = tmp_path / "none.yaml"
    assert cli.main(["entropy", "--config", str(missing)]) == cli.EXIT_CONFIG
    guard = write_config(tmp_path, {"experiment": "typical", "N": 40, "probs": [0.5, 0.5]}, "g.yaml")
    assert cli.main(["typical", "--config", str(guard)]) == cli.EXIT_GUARD
    bad = write_config(tmp_path, {"experiment": "huffman", "probs": [0.5, 0.6]}, "b.yaml")
    assert cli.main(["huffman", "--config", str(bad)]) == cli.EXIT_INVARIANT
    kind = write_config(tmp_path, {"experiment": "audit-channel", "code": "other"}, "k.yaml")
    assert cli.main(["audit-channel", "--config", str(kind)]) == cli.EXIT_CONFIG
    entropy = write_config(tmp_path, {"experiment": "entropy", "rho": {"diag": [0.9, 0.2]}}, "e.yaml")
    assert cli.main(["entropy", "--config", str(entropy)]) == cli.EXIT_INVARIANT
