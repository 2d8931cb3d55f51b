"""Config loading: model resolution, validation paths, sampling plans."""

import json

import numpy as np
import pytest

from ashgeo.config import format_beta, load_config, load_config_file, parse_beta
from ashgeo.errors import ConfigError


def flat_doc(**over):
    doc = {
        "model": {"frw": {"preset": "flat"}},
        "beta": "1",
        "samples": {"count": 3, "seed": 7},
    }
    doc.update(over)
    return doc


def slice_doc(metric=None, weingarten=None):
    eye = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    zero = [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]
    return {
        "model": {"slice": {
            "names": ["x1", "x2", "x3"],
            "box": [[-1, 1], [-1, 1], [-1, 1]],
            "metric": metric or eye,
            "weingarten": weingarten or zero,
        }},
        "beta": "1",
        "samples": {"count": 2, "seed": 1},
    }


# ---------------------------------------------------------------------- beta


@pytest.mark.parametrize("text,value", [
    ("1", 1 + 0j),
    ("i", 1j),
    ("-i", -1j),
    ("0.2374", 0.2374 + 0j),
    ("1+0.5i", 1 + 0.5j),
    ("-2.5e-1i", -0.25j),
    ("1e0+1e0i", 1 + 1j),
    (2, 2 + 0j),
    ({"re": 0.5, "im": -1.0}, 0.5 - 1j),
])
def test_parse_beta_accepts(text, value):
    assert parse_beta(text) == value


@pytest.mark.parametrize("text", ["", "0", "0i", "i+1", "one", None, True, {"re": "x"}])
def test_parse_beta_rejects(text):
    with pytest.raises(ConfigError):
        parse_beta(text)


def test_format_beta_roundtrips():
    for b in (1 + 0j, 1j, 0.2374 + 0j, -1.5 + 0.25j, 2 - 3j):
        assert parse_beta(format_beta(b)) == b


# --------------------------------------------------------------------- model


def test_frw_preset_resolves_to_slice_quantities():
    cfg = load_config(flat_doc())
    assert cfg.model_kind == "frw"
    assert cfg.tau0 == 0.0
    p = {"x1": 0.0, "x2": 0.0, "x3": 0.0}
    # flat preset, a = exp(t/2): induced metric is the identity at tau0 = 0
    assert np.allclose(cfg.q.mat(p), np.eye(3))
    assert np.allclose(cfg.w.at(p), 0.5 * np.eye(3))


def test_explicit_frw_with_custom_scale():
    doc = flat_doc()
    doc["model"] = {"frw": {"kappa": 1, "scale": "1 + 0.1*t^2"},
                    "tau0": 0.5}
    cfg = load_config(doc)
    assert cfg.frw is not None
    assert cfg.frw.kappa == 1
    assert cfg.tau0 == 0.5


def test_model_requires_exactly_one_source():
    doc = flat_doc()
    doc["model"] = {}
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(doc)
    two = slice_doc()
    two["model"]["frw"] = {"preset": "flat"}
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(two)


def test_preset_excludes_other_frw_keys():
    doc = flat_doc()
    doc["model"]["frw"]["kappa"] = 0
    with pytest.raises(ConfigError, match="preset excludes"):
        load_config(doc)


def test_tau0_must_be_interior():
    doc = flat_doc()
    doc["model"]["tau0"] = 1.5  # the preset interval is (-1.5, 1.5)
    with pytest.raises(ConfigError, match="tau0"):
        load_config(doc)


def test_tau0_rejected_for_slice_models():
    doc = slice_doc()
    doc["model"]["tau0"] = 0.0
    with pytest.raises(ConfigError, match="not meaningful"):
        load_config(doc)


def test_split_model_weingarten_from_rate():
    doc = {
        "model": {"split": {
            "time": "t",
            "t_interval": [-1.0, 1.0],
            "names": ["x1", "x2", "x3"],
            "box": [[-1, 1], [-1, 1], [-1, 1]],
            "metric": [["exp(t)", "0", "0"], ["0", "exp(t)", "0"], ["0", "0", "exp(t)"]],
        }, "tau0": 0.0},
        "beta": "1",
    }
    cfg = load_config(doc)
    p = {"x1": 0.2, "x2": -0.3, "x3": 0.1}
    # q = e^t * Id gives W = (1/2) q^{-1} dq/dt = Id/2 at every time
    assert np.allclose(cfg.w.at(p), 0.5 * np.eye(3), atol=1e-12)


def test_nonsymmetric_metric_is_a_config_error():
    bad = [["1", "0.2", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    with pytest.raises(ConfigError, match="model.slice.metric"):
        load_config(slice_doc(metric=bad))


def test_indefinite_metric_is_a_config_error():
    bad = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]]
    with pytest.raises(ConfigError, match="model.slice.metric"):
        load_config(slice_doc(metric=bad))


def test_metric_expression_errors_carry_field_path():
    bad = [["1", "0", "0"], ["0", "1 +", "0"], ["0", "0", "1"]]
    with pytest.raises(ConfigError, match=r"model\.slice\.metric\[1\]\[1\]"):
        load_config(slice_doc(metric=bad))


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError, match="unknown keys"):
        load_config(flat_doc(extra=1))


# ------------------------------------------------------------------- samples


def test_sample_points_reproducible_by_seed():
    a = load_config(flat_doc()).sample_points()
    b = load_config(flat_doc()).sample_points()
    assert a == b
    doc = flat_doc()
    doc["samples"]["seed"] = 8
    c = load_config(doc).sample_points()
    assert a != c


def test_explicit_points_checked_against_chart():
    doc = flat_doc()
    doc["samples"] = {"points": [{"x1": 0.0, "x2": 0.0, "x3": 5.0}]}
    with pytest.raises(ConfigError, match=r"samples\.points\[0\]"):
        load_config(doc)
    doc["samples"] = {"points": [{"x1": 0.0, "x2": 0.0}]}
    with pytest.raises(ConfigError, match="missing"):
        load_config(doc)


def test_points_exclude_count_and_seed():
    doc = flat_doc()
    doc["samples"] = {"points": [{"x1": 0, "x2": 0, "x3": 0}], "seed": 1}
    with pytest.raises(ConfigError, match="excludes"):
        load_config(doc)


def test_count_must_be_positive():
    doc = flat_doc()
    doc["samples"]["count"] = 0
    with pytest.raises(ConfigError, match="samples.count"):
        load_config(doc)


# ------------------------------------------------------- format / tolerances


def test_format_validated():
    with pytest.raises(ConfigError, match="format"):
        load_config(flat_doc(format="yaml"))
    assert load_config(flat_doc(format="csv")).fmt == "csv"


def test_tolerances_must_be_positive():
    with pytest.raises(ConfigError, match="tolerances.jacobi"):
        load_config(flat_doc(tolerances={"jacobi": 0}))
    cfg = load_config(flat_doc(tolerances={"jacobi": 1e-6}))
    assert cfg.tolerances == {"jacobi": 1e-6}


def test_json_string_and_file_inputs(tmp_path):
    text = json.dumps(flat_doc())
    assert load_config(text).model_kind == "frw"
    f = tmp_path / "cfg.json"
    f.write_text(text)
    assert load_config_file(str(f)).model_kind == "frw"
    with pytest.raises(ConfigError, match="invalid json"):
        load_config("{nope")
    with pytest.raises(ConfigError, match="cannot read"):
        load_config_file(str(tmp_path / "absent.json"))
