"""Config and data loading shared by the CLI and the estimators.

Configs are YAML (JSON is a subset, so ``.json`` files load the same way).
Complex numbers are written either as plain reals or as ``[re, im]`` pairs;
basis strings as digit strings (``"0110"``) or integer lists.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import yaml

from .core import (
    ManyLetterSpace,
    ManyLetterVector,
    MessageEnsemble,
    MessageMatrix,
    QuantumAlphabet,
    ensemble_to_matrix,
)
from .exceptions import ConfigError

EXPERIMENTS = (
    "entropy",
    "huffman",
    "kraft",
    "typical",
    "block-code",
    "translate",
    "schumacher",
    "schumacher-grand",
    "lossless-grand",
    "lossless-general",
    "core-info",
    "audit-channel",
)


def parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex number must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex number {value!r}") from exc
    if isinstance(value, (int, float, complex)):
        return complex(value)
    raise ConfigError(f"cannot parse complex number {value!r}")


def parse_matrix(rows) -> np.ndarray:
    """Square or rectangular complex matrix from nested lists."""
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ConfigError("matrix must be a non-empty list of rows")
    try:
        out = np.array([[parse_complex(v) for v in row] for row in rows], dtype=complex)
    except TypeError as exc:
        raise ConfigError(f"malformed matrix {rows!r}") from exc
    if out.ndim != 2:
        raise ConfigError("matrix rows have different lengths")
    return out


def parse_string(value) -> tuple:
    """Basis string from ``"0110"`` or ``[0, 1, 1, 0]``."""
    if isinstance(value, str):
        if value in ("", "·", "-"):
            return ()
        if not value.isdigit():
            raise ConfigError(f"basis string {value!r} must be a string of digits")
        return tuple(int(c) for c in value)
    if isinstance(value, (list, tuple)):
        return tuple(int(c) for c in value)
    raise ConfigError(f"cannot parse basis string {value!r}")


def parse_vector(spec, basis_dim: int) -> ManyLetterVector:
    """``{string: amplitude}`` mapping or list of ``[string, amplitude]`` pairs."""
    items = spec.items() if isinstance(spec, dict) else spec
    amps = {}
    for item in items:
        key, amp = item
        amps[parse_string(key)] = amps.get(parse_string(key), 0) + parse_complex(amp)
    return ManyLetterVector(amps, basis_dim)


def parse_alphabet(spec) -> QuantumAlphabet:
    """An integer ``d`` (standard basis) or a list of letter vectors."""
    if isinstance(spec, int):
        return QuantumAlphabet.standard(spec)
    if isinstance(spec, dict) and "letters" in spec:
        spec = spec["letters"]
    return QuantumAlphabet(parse_matrix(spec))


def parse_letter_matrix(spec) -> np.ndarray:
    """``rho`` as a matrix, or ``{diag: [...]}`` for a diagonal one."""
    if isinstance(spec, dict):
        if "diag" in spec:
            return np.diag([parse_complex(v) for v in spec["diag"]])
        if "matrix" in spec:
            return parse_matrix(spec["matrix"])
        raise ConfigError("letter matrix needs 'diag' or 'matrix'")
    return parse_matrix(spec)


def parse_message_matrix(spec) -> MessageMatrix:
    """Dense ``sigma`` over a truncated space: ``{basis_dim, lengths|max_length, matrix}``.

    Alternatively ``{basis_dim, ensemble: [[p, vector], ...]}``.
    """
    try:
        d = int(spec["basis_dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("message matrix needs an integer 'basis_dim'") from exc
    if "ensemble" in spec:
        members = [(float(p), parse_vector(v, d)) for p, v in spec["ensemble"]]
        return ensemble_to_matrix(MessageEnsemble(members))
    if "lengths" in spec:
        space = ManyLetterSpace(d, [int(n) for n in spec["lengths"]])
    elif "max_length" in spec:
        space = ManyLetterSpace.truncated(d, int(spec["max_length"]))
    else:
        raise ConfigError("message matrix needs 'lengths' or 'max_length'")
    M = parse_matrix(spec["matrix"])
    if M.shape != (space.dim, space.dim):
        raise ConfigError(f"matrix shape {M.shape} does not match space dimension {space.dim}")
    return MessageMatrix(space, sp.csr_matrix(M))


@dataclass
class ExperimentConfig:
    """One experiment run: name, parameters and where inputs came from."""

    experiment: str
    params: dict = field(default_factory=dict)
    source: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be a mapping")

    def get(self, key, default=None):
        return self.params.get(key, default)

    def require(self, key):
        if key not in self.params:
            raise ConfigError(f"experiment {self.experiment!r} needs parameter {key!r}")
        return self.params[key]

    def echo(self) -> dict:
        return {"experiment": self.experiment, "params": self.params, "source": self.source}


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    """Read a YAML/JSON config; a top-level ``params`` mapping is optional.

    Referenced files (keys ending in ``_file``) are resolved relative to the
    config and loaded in place of the key without the suffix.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a mapping")
    name = experiment or raw.get("experiment")
    if name is None:
        raise ConfigError("config names no experiment")
    if experiment and raw.get("experiment") not in (None, experiment):
        raise ConfigError(f"config is for {raw['experiment']!r}, not {experiment!r}")
    params = dict(raw.get("params", {k: v for k, v in raw.items() if k != "experiment"}))
    for key in [k for k in params if k.endswith("_file")]:
        ref = path.parent / params.pop(key)
        if not ref.exists():
            raise ConfigError(f"referenced file {ref} does not exist")
        try:
            params[key[: -len("_file")]] = yaml.safe_load(ref.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {ref}: {exc}") from exc
    return ExperimentConfig(name, params, str(path))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return "".join(map(str, value)) if all(isinstance(v, int) for v in value) else json.dumps(value)
    if value is None:
        return ""
    return str(value)


def rows_to_tsv(rows: list) -> str:
    """Tab-separated table; columns in first-seen order across all rows."""
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def to_jsonable(value):
    """Recursively convert numpy and complex values for JSON output."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value
