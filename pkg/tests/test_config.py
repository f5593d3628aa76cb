import json

import numpy as np
import pytest

from ultracold_jc.config import BUNDLED, ConfigError, load_config, parse_config


def base(**over):
    raw = {
        "name": "small",
        "scenario": {"coupling": {"kind": "quadratic", "g0": 1, "lambda": 1, "sign": "-"}, "dims": {"n_cm": 24, "n_field": 4}},
        "initial": {"z0": -0.25, "p0": 0.25, "field": {"kind": "fock", "value": 0}},
        "times": {"start": 0, "stop": 1, "steps": 10},
        "method": "all",
    }
    raw.update(over)
    return raw


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_configs_load(name):
    cfg = load_config(name)
    assert cfg.name == name and cfg.method == "all"
    assert len(cfg.variants) == 2
    assert cfg.scenario.times[0] == 0 and cfg.scenario.times[-1] == 6
    assert all(v.scenario.coupling.g0 == 1 and v.scenario.coupling.lam == 1 for v in cfg.variants)


def test_bundled_parameters():
    a = load_config("fig1a")
    assert [v.scenario.coupling.sign for v in a.variants] == ["+", "-"]
    assert a.initial.beta == pytest.approx((-0.25 + 0.25j) / np.sqrt(2))
    f2 = load_config("fig2")
    assert f2.initial.field_kind == "coherent" and f2.initial.field_value == 1
    assert [v.initial.p0 for v in f2.variants] == pytest.approx([0.25, 0.15])
    assert f2.q_function.times == (0.0, 3.0, 6.0)


def test_steps_count_intervals():
    cfg = parse_config(base())
    assert cfg.scenario.times.size == 11
    assert cfg.variants[0].label == "main"


def test_complex_values_and_beta():
    cfg = parse_config(base(initial={"beta": [0.1, -0.2], "c_e": [0, 1], "field": {"kind": "coherent", "value": [0.5, 0.5]}}))
    assert cfg.initial.beta == 0.1 - 0.2j
    assert cfg.initial.c_e == 1j
    assert cfg.initial.field_value == 0.5 + 0.5j


def test_variants_merge_over_base():
    cfg = parse_config(base(variants=[{"label": "a"}, {"label": "b", "coupling": {"sign": "+"}, "initial": {"p0": 0.15}}]))
    a, b = cfg.variants
    assert (a.scenario.coupling.sign, b.scenario.coupling.sign) == ("-", "+")
    assert b.initial.p0 == pytest.approx(0.15) and b.initial.z0 == pytest.approx(-0.25)


@pytest.mark.parametrize(
    "over, path",
    [
        ({"bogus": 1}, "config"),
        ({"method": "euler"}, "method"),
        ({"times": {"start": 0, "stop": 1, "steps": 0}}, "times.steps"),
        ({"scenario": {"dims": {"n_cm": 8, "n_field": 2}}}, "scenario.dims"),
        ({"scenario": {"coupling": {"kind": "sech2"}}}, "variants[0].scenario.coupling.kind"),
        ({"scenario": {"delta": 0.5}}, "variants[0].scenario.delta"),
        ({"initial": {"c_e": [1, 0], "c_g": [1, 0]}}, "initial"),
        ({"variants": [{"label": "a.b"}]}, "variants[0].label"),
        ({"variants": [{"label": "a"}, {"label": "a"}]}, "variants[1].label"),
        ({"units": {"g_hz": -1}}, "units"),
    ],
)
def test_validation_errors_name_the_field(over, path):
    with pytest.raises(ConfigError) as info:
        parse_config(base(**over))
    assert info.value.path.startswith(path)


def test_numerical_methods_allow_general_couplings():
    cfg = parse_config(base(method="decomposed", scenario={"coupling": {"kind": "sech2", "params": {"width": 1}}, "delta": 0.5, "dims": {"n_cm": 16, "n_field": 3}}))
    assert cfg.scenario.delta == 0.5


def test_with_dims_and_method():
    cfg = parse_config(base()).with_dims(48, 6).with_method("oracle")
    assert (cfg.scenario.dims.n_cm, cfg.scenario.dims.n_field, cfg.scenario.dims.guard_cm) == (48, 6, 12)
    assert cfg.methods == ("oracle",)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError) as info:
        load_config(bad)
    assert "line 1" in str(info.value)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(base()))
    assert load_config(good).name == "small"
