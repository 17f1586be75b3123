import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqec import config as C


def test_defaults():
    cfg = C.SimConfig()
    assert cfg.kappa == 800.0 and cfg.lambda0 == 800.0 and cfg.n_steps == 100_000
    assert cfg.epsilon == 1.05 and cfg.output_stride == 100


@pytest.mark.parametrize("name", sorted(C.PRESETS))
def test_presets_round_trip(name):
    cfg = C.from_dict({}, preset=name)
    assert C.echo_roundtrip(cfg) == cfg


def test_fig2_preset_values():
    cfg = C.from_dict({}, preset="fig2")
    assert cfg.kappa == 800.0 and cfg.lambda0 == 600.0 and cfg.T_gamma == 1.0


@settings(max_examples=30)
@given(
    eta=st.floats(0.01, 1.0),
    kappa=st.floats(0.0, 4000.0),
    stride=st.integers(1, 1000),
    seed=st.integers(0, 2**40),
)
def test_round_trip_is_exact(eta, kappa, stride, seed):
    cfg = C.SimConfig(eta=eta, kappa_over_gamma=kappa, output_stride=stride, seed=seed)
    assert C.echo_roundtrip(cfg) == cfg


@pytest.mark.parametrize("bad, field", [
    ({"eta": 0.0}, "eta"),
    ({"eta": 1.5}, "eta"),
    ({"kappa_over_gamma": 10000.0}, "dt_gamma"),
    ({"output_stride": 0}, "output_stride"),
    ({"controller": "pid"}, "controller"),
    ({"real_initial": "101"}, "real_initial"),
    ({"flip_injection": [4, 0.1]}, "flip_injection"),
    ({"sweep": {"param": "gamma", "values": [1]}}, "sweep"),
])
def test_validation_names_the_field(bad, field):
    with pytest.raises(C.ConfigError, match=field):
        C.from_dict(bad)


def test_unknown_keys_and_presets():
    with pytest.raises(C.ConfigError, match="unknown configuration key"):
        C.from_dict({"kapa": 1})
    with pytest.raises(C.ConfigError, match="unknown preset"):
        C.from_dict({}, preset="fig9")


def test_overrides_and_file_loading(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"eta": 0.8, "T_gamma": 0.5}))
    cfg = C.load(p, preset="fig3a", overrides=["eta=0.6", "controller=ahn"])
    assert cfg.eta == 0.6 and cfg.T_gamma == 0.5 and cfg.controller == "ahn" and cfg.preset == "fig3a"
    with pytest.raises(C.ConfigError):
        C.parse_override("eta")


def test_logical_state_normalizes():
    ls = C.SimConfig(real_initial=[3, 4]).logical_state
    assert ls.alpha == pytest.approx(0.6) and ls.beta == pytest.approx(0.8)
