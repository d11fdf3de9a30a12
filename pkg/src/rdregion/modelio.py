"""Model files and report formatting.

A model file is a JSON document with "schema_version": 1 and exactly one of:

* "bayes_net" — an object with the five tree factors "f", "z_given_f",
  "x1_given_z", "x2_given_z", "x3_given_f", each a probability vector or a
  row-stochastic matrix (rows indexed by the conditioning symbol);
* "joint" — an object with "variables" (a list of {"name", "symbols"}
  declarations) and "probabilities" (a nested array matching the declared
  sizes).  Five-variable models must declare X1, X2, X3, Z, F (any order);
  two-variable models (source plus side information) may use any names.

Optional blocks: "channels" ({"w1": rows, "w2": rows, "w3": rows}, each row
conditioned on the matching source symbol) and "distortions" (an object
mapping a declared variable name to a cost matrix, rows indexed by the source
symbol, columns by the reconstruction).

Probabilities are written as decimal strings (plain numbers are accepted).
Rows whose sum drifts from 1 by at most 1e-9 are renormalized; larger drift is
rejected with a message naming the factor and row.

Report formatting: every float that leaves the package goes through
format_float / round_floats, which fix six significant digits so fixtures are
byte-stable across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import InputError
from .probability import Alphabet, JointPMF, indexed_alphabet
from .sources import (
    CANONICAL_AXES,
    DistortionMeasure,
    SourceModel,
    TestChannelTriple,
    TreeModelSpec,
    assemble_tree_model,
    test_channel,
)

SCHEMA_VERSION = 1
ROW_SUM_SLACK = 1e-9

_TREE_FACTORS = ("f", "z_given_f", "x1_given_z", "x2_given_z", "x3_given_f")


# ---------------------------------------------------------------------------
# Numeric parsing
# ---------------------------------------------------------------------------

def _number(value: Any, where: str) -> float:
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise InputError(f"{where}: {value!r} is not a decimal number") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a decimal string or number, got {type(value).__name__}")
    return float(value)


def _vector(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty array")
    return np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(value)])


def _matrix(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty array of rows")
    rows = [_vector(row, f"{where} row {i}") for i, row in enumerate(value)]
    width = rows[0].shape[0]
    for i, row in enumerate(rows):
        if row.shape[0] != width:
            raise InputError(f"{where} row {i}: {row.shape[0]} entries, expected {width}")
    return np.stack(rows)


def _nested_array(value: Any, shape: tuple[int, ...], where: str) -> np.ndarray:
    if not shape:
        return np.array(_number(value, where))
    if not isinstance(value, list):
        raise InputError(f"{where}: expected an array of length {shape[0]}")
    if len(value) != shape[0]:
        raise InputError(f"{where}: {len(value)} entries, expected {shape[0]}")
    return np.stack([_nested_array(v, shape[1:], f"{where}[{i}]") for i, v in enumerate(value)])


def _validated_rows(raw: np.ndarray, factor: str) -> np.ndarray:
    """Check nonnegativity and row sums (1e-9 slack), then renormalize rows."""
    rows = raw if raw.ndim == 2 else raw[None, :]
    if np.any(rows < 0):
        bad = int(np.argwhere(rows < 0)[0][0])
        raise InputError(f"factor {factor!r} row {bad} has a negative probability")
    sums = rows.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > ROW_SUM_SLACK:
            raise InputError(f"factor {factor!r} row {i} sums to {s:.10g}, expected 1")
    out = rows / sums[:, None]
    return out if raw.ndim == 2 else out[0]


# ---------------------------------------------------------------------------
# The parsed file
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelFile:
    """A fully validated model file: the joint plus any optional blocks."""

    name: str | None
    joint: JointPMF
    tree: TreeModelSpec | None
    channels: TestChannelTriple | None
    distortions: dict[str, DistortionMeasure]

    @property
    def is_five_variable(self) -> bool:
        return set(self.joint.names) == set(CANONICAL_AXES)

    def source_model(self) -> SourceModel:
        if not self.is_five_variable:
            raise InputError(
                f"model declares variables {list(self.joint.names)}; "
                f"this command needs the five variables {list(CANONICAL_AXES)}"
            )
        if self.tree is not None:
            return SourceModel(self.joint, tree=self.tree)
        return SourceModel.from_joint(self.joint)

    def two_variable_joint(self) -> JointPMF:
        if len(self.joint.names) != 2:
            raise InputError(
                f"model declares {len(self.joint.names)} variables; "
                "this command needs exactly two (source, side information)"
            )
        return self.joint


def _parse_tree(block: Any) -> tuple[TreeModelSpec, JointPMF]:
    if not isinstance(block, Mapping):
        raise InputError("bayes_net: expected an object with the five factors")
    missing = [k for k in _TREE_FACTORS if k not in block]
    if missing:
        raise InputError(f"bayes_net: missing factor(s) {missing}")
    extra = [k for k in block if k not in _TREE_FACTORS]
    if extra:
        raise InputError(f"bayes_net: unknown factor(s) {extra}")
    f = _validated_rows(_vector(block["f"], "factor 'f'"), "f")
    mats = {}
    for key in _TREE_FACTORS[1:]:
        mats[key] = _validated_rows(_matrix(block[key], f"factor {key!r}"), key)
    if mats["z_given_f"].shape[0] != f.shape[0]:
        raise InputError(
            f"factor 'z_given_f' has {mats['z_given_f'].shape[0]} rows "
            f"for {f.shape[0]} values of F"
        )
    z_size = mats["z_given_f"].shape[1]
    for key, need, of in (("x1_given_z", z_size, "Z"), ("x2_given_z", z_size, "Z"),
                          ("x3_given_f", f.shape[0], "F")):
        if mats[key].shape[0] != need:
            raise InputError(f"factor {key!r} has {mats[key].shape[0]} rows for {need} values of {of}")
    spec = TreeModelSpec(
        f_prior=f,
        z_given_f=mats["z_given_f"],
        x1_given_z=mats["x1_given_z"],
        x2_given_z=mats["x2_given_z"],
        x3_given_f=mats["x3_given_f"],
    )
    return spec, assemble_tree_model(spec).joint


def _parse_joint(block: Any) -> JointPMF:
    if not isinstance(block, Mapping):
        raise InputError("joint: expected an object with 'variables' and 'probabilities'")
    if "variables" not in block or "probabilities" not in block:
        raise InputError("joint: needs both 'variables' and 'probabilities'")
    decls = block["variables"]
    if not isinstance(decls, list) or not decls:
        raise InputError("joint.variables: expected a non-empty list")
    axes = []
    for i, decl in enumerate(decls):
        if not isinstance(decl, Mapping) or "name" not in decl or "symbols" not in decl:
            raise InputError(f"joint.variables[{i}]: expected {{'name', 'symbols'}}")
        name = decl["name"]
        symbols = decl["symbols"]
        if not isinstance(name, str) or not name:
            raise InputError(f"joint.variables[{i}]: name must be a non-empty string")
        if (not isinstance(symbols, list) or not symbols
                or not all(isinstance(s, str) for s in symbols)):
            raise InputError(f"joint.variables[{i}] ({name}): symbols must be a list of strings")
        axes.append(Alphabet(name, tuple(symbols)))
    shape = tuple(a.size for a in axes)
    probs = _nested_array(block["probabilities"], shape, "joint.probabilities")
    if np.any(probs < 0):
        raise InputError("joint.probabilities contains a negative value")
    total = float(probs.sum())
    if abs(total - 1.0) > ROW_SUM_SLACK:
        raise InputError(f"joint.probabilities sums to {total:.10g}, expected 1")
    return JointPMF(tuple(axes), probs / total)


def _parse_channels(block: Any, joint: JointPMF) -> TestChannelTriple:
    if not isinstance(block, Mapping):
        raise InputError("channels: expected an object with 'w1', 'w2', 'w3'")
    missing = [k for k in ("w1", "w2", "w3") if k not in block]
    if missing:
        raise InputError(f"channels: missing {missing}")
    extra = [k for k in block if k not in ("w1", "w2", "w3")]
    if extra:
        raise InputError(f"channels: unknown key(s) {extra}")
    if set(joint.names) != set(CANONICAL_AXES):
        raise InputError("channels are only meaningful for five-variable models")
    chans = []
    for m in (1, 2, 3):
        rows = _validated_rows(_matrix(block[f"w{m}"], f"channels.w{m}"), f"channels.w{m}")
        x_alpha = joint.alphabet(f"X{m}")
        if rows.shape[0] != x_alpha.size:
            raise InputError(
                f"channels.w{m} has {rows.shape[0]} rows for {x_alpha.size} source symbols"
            )
        chans.append(test_channel(m, x_alpha, rows))
    return TestChannelTriple(chans[0], chans[1], chans[2])


def _parse_distortions(block: Any, joint: JointPMF) -> dict[str, DistortionMeasure]:
    if not isinstance(block, Mapping):
        raise InputError("distortions: expected an object mapping variable name to cost matrix")
    out: dict[str, DistortionMeasure] = {}
    for name, raw in block.items():
        if name not in joint.names:
            raise InputError(f"distortions: {name!r} is not a declared variable")
        matrix = _matrix(raw, f"distortions.{name}")
        if np.any(matrix < 0):
            raise InputError(f"distortions.{name}: costs must be nonnegative")
        src = joint.alphabet(name)
        if matrix.shape[0] != src.size:
            raise InputError(
                f"distortions.{name}: {matrix.shape[0]} rows for {src.size} source symbols"
            )
        recon = indexed_alphabet(name + "_hat", matrix.shape[1])
        out[name] = DistortionMeasure(src, recon, matrix)
    return out


def parse_model_data(data: Any) -> ModelFile:
    """Validate a decoded JSON document and build the model it declares."""
    if not isinstance(data, Mapping):
        raise InputError("model file must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    known = {"schema_version", "name", "bayes_net", "joint", "channels", "distortions"}
    unknown = [k for k in data if k not in known]
    if unknown:
        raise InputError(f"unknown top-level key(s) {unknown}")
    has_tree = "bayes_net" in data
    has_joint = "joint" in data
    if has_tree == has_joint:
        raise InputError("model file must hold exactly one of 'bayes_net' or 'joint'")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise InputError("name must be a string")
    if has_tree:
        tree, joint = _parse_tree(data["bayes_net"])
    else:
        tree, joint = None, _parse_joint(data["joint"])
    channels = _parse_channels(data["channels"], joint) if "channels" in data else None
    distortions = (_parse_distortions(data["distortions"], joint)
                   if "distortions" in data else {})
    return ModelFile(name=name, joint=joint, tree=tree,
                     channels=channels, distortions=distortions)


def load_model_file(path: str | Path) -> ModelFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"cannot read model file {p}: {e.strerror or e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{p}: parse error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_model_data(data)


# ---------------------------------------------------------------------------
# Writing models
# ---------------------------------------------------------------------------

def _prob_str(v: float) -> str:
    """Shortest decimal string that round-trips the double."""
    return repr(float(v))


def _rows_to_strings(rows: np.ndarray) -> list:
    if rows.ndim == 1:
        return [_prob_str(v) for v in rows]
    return [[_prob_str(v) for v in row] for row in rows]


def tree_model_data(spec: TreeModelSpec, name: str | None = None,
                    channels: TestChannelTriple | None = None) -> dict:
    data: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if name:
        data["name"] = name
    data["bayes_net"] = {
        "f": _rows_to_strings(np.asarray(spec.f_prior)),
        "z_given_f": _rows_to_strings(np.asarray(spec.z_given_f)),
        "x1_given_z": _rows_to_strings(np.asarray(spec.x1_given_z)),
        "x2_given_z": _rows_to_strings(np.asarray(spec.x2_given_z)),
        "x3_given_f": _rows_to_strings(np.asarray(spec.x3_given_f)),
    }
    if channels is not None:
        data["channels"] = {
            f"w{m}": _rows_to_strings(np.asarray(channels.channels[m - 1].rows))
            for m in (1, 2, 3)
        }
    return data


def joint_model_data(joint: JointPMF, name: str | None = None) -> dict:
    def nest(arr: np.ndarray) -> Any:
        if arr.ndim == 0:
            return _prob_str(float(arr))
        return [nest(sub) for sub in arr]

    data: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if name:
        data["name"] = name
    data["joint"] = {
        "variables": [{"name": a.name, "symbols": list(a.symbols)} for a in joint.axes],
        "probabilities": nest(np.asarray(joint.probs)),
    }
    return data


def save_model_file(data: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Report formatting
# ---------------------------------------------------------------------------

def format_float(v: float) -> str:
    """Six significant digits; the format used by every CSV and JSON report."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.6g" % (v + 0.0)


def round_floats(obj: Any) -> Any:
    """Recursively round floats to six significant digits for JSON output."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(format_float(obj))
    if isinstance(obj, np.floating):
        return round_floats(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Mapping):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    raise InputError(f"cannot serialize {type(obj).__name__} into a report")


def report_json(obj: Any) -> str:
    """Byte-stable JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(round_floats(obj), indent=2, sort_keys=True) + "\n"
