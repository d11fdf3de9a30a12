"""Model file parsing, serialization, and report formatting."""

import copy
import json
import math
from pathlib import Path

import numpy as np
import pytest

from rdregion.errors import InputError
from rdregion.modelio import (
    SCHEMA_VERSION,
    ModelFile,
    format_float,
    joint_model_data,
    load_model_file,
    parse_model_data,
    report_json,
    round_floats,
    save_model_file,
    tree_model_data,
)
from rdregion.sources import bsc_matrix, is_tree_model, reference_model

MODELS = Path(__file__).resolve().parent.parent / "models"


def reference_tree_data():
    return {
        "schema_version": 1,
        "name": "example",
        "bayes_net": {
            "f": ["0.5", "0.5"],
            "z_given_f": [["0.9", "0.1"], ["0.1", "0.9"]],
            "x1_given_z": [["0.9", "0.1"], ["0.1", "0.9"]],
            "x2_given_z": [["0.8", "0.2"], ["0.2", "0.8"]],
            "x3_given_f": [["0.9", "0.1"], ["0.1", "0.9"]],
        },
    }


# ---------------------------------------------------------------------------
# Parsing valid documents
# ---------------------------------------------------------------------------

def test_parse_tree_document():
    mf = parse_model_data(reference_tree_data())
    assert mf.name == "example"
    assert mf.tree is not None
    assert mf.is_five_variable
    model = mf.source_model()
    assert np.allclose(model.joint.probs, reference_model().joint.probs, atol=1e-15)
    with pytest.raises(InputError):
        mf.two_variable_joint()


def test_numbers_accept_strings_and_floats():
    data = reference_tree_data()
    data["bayes_net"]["f"] = [0.5, "0.5"]
    mf = parse_model_data(data)
    assert abs(float(mf.joint.probs.sum()) - 1.0) < 1e-12
    data["bayes_net"]["f"] = ["half", "0.5"]
    with pytest.raises(InputError):
        parse_model_data(data)
    data["bayes_net"]["f"] = [True, "0.5"]
    with pytest.raises(InputError):
        parse_model_data(data)


def test_parse_joint_document():
    data = {
        "schema_version": 1,
        "joint": {
            "variables": [
                {"name": "X", "symbols": ["0", "1"]},
                {"name": "Y", "symbols": ["0", "1"]},
            ],
            "probabilities": [["0.375", "0.125"], ["0.125", "0.375"]],
        },
    }
    mf = parse_model_data(data)
    assert mf.name is None
    assert mf.tree is None
    assert not mf.is_five_variable
    joint = mf.two_variable_joint()
    assert joint.names == ("X", "Y")
    assert np.allclose(joint.probs, [[0.375, 0.125], [0.125, 0.375]])
    with pytest.raises(InputError):
        mf.source_model()


def test_round_trip_tree_with_channels():
    from rdregion.sources import TestChannelTriple as ChannelTriple
    from rdregion.sources import test_channel as make_test_channel
    model = reference_model()
    channels = ChannelTriple(
        make_test_channel(1, model.alphabet("X1"), bsc_matrix(0.25)),
        make_test_channel(2, model.alphabet("X2"), bsc_matrix(0.25)),
        make_test_channel(3, model.alphabet("X3"), bsc_matrix(0.25)),
    )
    data = tree_model_data(model.tree, name="round-trip", channels=channels)
    mf = parse_model_data(data)
    assert mf.name == "round-trip"
    assert mf.channels is not None
    for ch in mf.channels.channels:
        assert np.allclose(np.asarray(ch.rows), bsc_matrix(0.25), atol=1e-15)
    assert np.allclose(mf.joint.probs, model.joint.probs, atol=1e-15)


def test_round_trip_joint(tmp_path):
    model = reference_model()
    data = joint_model_data(model.joint, name="dense")
    path = tmp_path / "dense.json"
    save_model_file(data, path)
    mf = load_model_file(path)
    assert mf.name == "dense"
    # repr() strings round-trip the doubles; the parser's renormalization may
    # shift entries by one ulp
    assert np.allclose(mf.joint.probs, model.joint.probs, rtol=0, atol=1e-15)


def test_shipped_model_files_load():
    ref = load_model_file(MODELS / "reference_tree.json")
    assert ref.name == "reference-tree"
    assert ref.tree is not None and ref.channels is not None
    assert is_tree_model(ref.source_model())

    two = load_model_file(MODELS / "binary_side_info.json")
    assert two.name == "binary-side-info"
    joint = two.two_variable_joint()
    assert joint.names == ("X", "Y")
    assert abs(float(joint.probs[0, 1] + joint.probs[1, 0]) - 0.25) < 1e-12

    bad = load_model_file(MODELS / "copied_third_source.json")
    assert bad.name == "copied-third-source"
    assert not is_tree_model(bad.source_model())


def test_distortions_block():
    data = reference_tree_data()
    data["distortions"] = {"X1": [["0", "2"], ["1", "0"]]}
    mf = parse_model_data(data)
    assert set(mf.distortions) == {"X1"}
    m = mf.distortions["X1"]
    assert np.allclose(m.matrix, [[0.0, 2.0], [1.0, 0.0]])
    assert m.recon.size == 2


# ---------------------------------------------------------------------------
# Rejection paths
# ---------------------------------------------------------------------------

def test_row_sum_error_message():
    data = reference_tree_data()
    data["bayes_net"]["z_given_f"][0] = ["0.8", "0.1"]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert str(err.value) == "factor 'z_given_f' row 0 sums to 0.9, expected 1"


def test_negative_probability_rejected():
    data = reference_tree_data()
    data["bayes_net"]["f"] = ["1.5", "-0.5"]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "negative" in str(err.value)


def test_schema_version_checked():
    data = reference_tree_data()
    data["schema_version"] = 2
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "schema_version" in str(err.value)
    del data["schema_version"]
    with pytest.raises(InputError):
        parse_model_data(data)
    assert SCHEMA_VERSION == 1


def test_exactly_one_model_block():
    data = reference_tree_data()
    data["joint"] = {"variables": [{"name": "X", "symbols": ["0"]}],
                     "probabilities": ["1"]}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "exactly one" in str(err.value)
    del data["bayes_net"], data["joint"]
    with pytest.raises(InputError):
        parse_model_data(data)


def test_unknown_keys_rejected():
    data = reference_tree_data()
    data["extra"] = 1
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "extra" in str(err.value)
    data = reference_tree_data()
    data["bayes_net"]["w_given_z"] = [["1.0"]]
    with pytest.raises(InputError):
        parse_model_data(data)


def test_tree_shape_mismatches():
    data = reference_tree_data()
    data["bayes_net"]["x3_given_f"] = [["0.9", "0.1"]]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "x3_given_f" in str(err.value)
    data = reference_tree_data()
    del data["bayes_net"]["f"]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "missing" in str(err.value)


def test_joint_shape_and_sum_errors():
    base = {
        "schema_version": 1,
        "joint": {
            "variables": [
                {"name": "X", "symbols": ["0", "1"]},
                {"name": "Y", "symbols": ["0", "1"]},
            ],
            "probabilities": [["0.375", "0.125"], ["0.125", "0.375"]],
        },
    }
    data = copy.deepcopy(base)
    data["joint"]["probabilities"] = [["0.5", "0.5"]]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "expected 2" in str(err.value)
    data = copy.deepcopy(base)
    data["joint"]["probabilities"] = [["0.375", "0.125"], ["0.125", "0.3"]]
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "sums to" in str(err.value)
    data = copy.deepcopy(base)
    del data["joint"]["variables"]
    with pytest.raises(InputError):
        parse_model_data(data)
    data = copy.deepcopy(base)
    data["joint"]["variables"][0]["symbols"] = []
    with pytest.raises(InputError):
        parse_model_data(data)


def test_channels_block_errors():
    data = reference_tree_data()
    data["channels"] = {"w1": [["1", "0"], ["0", "1"]], "w2": [["1"], ["1"]]}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "missing" in str(err.value) and "w3" in str(err.value)
    rows = [["1", "0"], ["0", "1"]]
    data["channels"] = {"w1": rows, "w2": rows, "w3": rows, "w4": rows}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "w4" in str(err.value)
    data["channels"] = {"w1": [["1", "0"]], "w2": rows, "w3": rows}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "1 rows for 2 source symbols" in str(err.value)
    two_var = {
        "schema_version": 1,
        "joint": {
            "variables": [{"name": "X", "symbols": ["0", "1"]},
                          {"name": "Y", "symbols": ["0", "1"]}],
            "probabilities": [["0.375", "0.125"], ["0.125", "0.375"]],
        },
        "channels": {"w1": rows, "w2": rows, "w3": rows},
    }
    with pytest.raises(InputError) as err:
        parse_model_data(two_var)
    assert "five-variable" in str(err.value)


def test_distortions_block_errors():
    data = reference_tree_data()
    data["distortions"] = {"Q": [["0", "1"], ["1", "0"]]}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "'Q'" in str(err.value)
    data["distortions"] = {"X1": [["0", "-1"], ["1", "0"]]}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "nonnegative" in str(err.value)
    data["distortions"] = {"X1": [["0", "1"]]}
    with pytest.raises(InputError) as err:
        parse_model_data(data)
    assert "1 rows for 2 source symbols" in str(err.value)


def test_json_syntax_error_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema_version": 1,\n  oops\n}\n')
    with pytest.raises(InputError) as err:
        load_model_file(path)
    assert "line 3" in str(err.value)
    assert "column 3" in str(err.value)


def test_missing_file_reports_path(tmp_path):
    with pytest.raises(InputError) as err:
        load_model_file(tmp_path / "absent.json")
    assert "absent.json" in str(err.value)


def test_not_an_object():
    with pytest.raises(InputError):
        parse_model_data([1, 2, 3])


# ---------------------------------------------------------------------------
# Report formatting
# ---------------------------------------------------------------------------

def test_format_float():
    assert format_float(0.35775077890333673) == "0.357751"
    assert format_float(1.0) == "1"
    assert format_float(-0.0) == "0"
    assert format_float(0.1) == "0.1"
    assert format_float(123456.789) == "123457"
    assert format_float(1.23e-7) == "1.23e-07"
    assert format_float(float("nan")) == "nan"
    assert format_float(float("inf")) == "inf"
    assert format_float(float("-inf")) == "-inf"


def test_round_floats():
    obj = {
        "a": 0.35775077890333673,
        "b": [1, 2.00000049, True, None],
        "c": {"d": np.float64(0.25), "e": np.int64(3)},
    }
    out = round_floats(obj)
    assert out["a"] == 0.357751
    assert out["b"][0] == 1 and isinstance(out["b"][0], int)
    assert out["b"][2] is True
    assert out["b"][3] is None
    assert out["c"]["d"] == 0.25
    assert out["c"]["e"] == 3 and isinstance(out["c"]["e"], int)
    with pytest.raises(InputError):
        round_floats({"x": object()})


def test_report_json_is_byte_stable():
    a = {"beta": 1.0, "alpha": {"y": 0.123456789, "x": [3.0, 2.0]}}
    b = {"alpha": {"x": [3.0, 2.0], "y": 0.123456789}, "beta": 1.0}
    sa, sb = report_json(a), report_json(b)
    assert sa == sb
    assert sa.endswith("\n")
    assert json.loads(sa) == {"alpha": {"x": [3.0, 2.0], "y": 0.123457}, "beta": 1.0}
    assert "  " in sa  # two-space indent


def test_model_file_dataclass_shape():
    mf = parse_model_data(reference_tree_data())
    assert isinstance(mf, ModelFile)
    assert mf.channels is None
    assert mf.distortions == {}
