import json

import pytest

from overset1d.config import ConfigError, config_from_dict, dump_config, load_config

from conftest import preset_path

MINIMAL = {
    "system": {"name": "burgers"},
    "geometry": {"a": 0.0, "b": 0.4, "c": 0.6, "d": 1.0},
    "grid": {"n_u": 30, "n_v": 30},
    "integrator": {"t_final": 0.1},
    "initial_condition": {"name": "burgers_bump"},
}


def with_(section, **kw):
    data = json.loads(json.dumps(MINIMAL))
    data.setdefault(section, {}).update(kw)
    return data


def test_defaults():
    cfg = config_from_dict(MINIMAL)
    assert cfg.geometry.eta == 0.5
    assert cfg.penalties.kappa == 0.0 and cfg.penalties.M == 0
    assert cfg.integrator.method == "ssprk3" and cfg.integrator.cfl == 0.5
    assert cfg.interpolation.mode == "exact_node"
    assert cfg.bc.kind == "reflective_none"


@pytest.mark.parametrize(
    "data,match",
    [
        (with_("geometry", eta=1.0), r"eta must lie in \(0,1\)"),
        (with_("geometry", b=0.6), "a < geometry.b < geometry.c"),
        (with_("geometry", b=0.7), "a < geometry.b < geometry.c"),
        (with_("grid", n_u=2), "at least 4"),
        (with_("grid", n_w=2), "unknown key.*n_w"),
        (with_("integrator", method="euler"), "ssprk3"),
        (with_("integrator", cfl=1.5), "cfl"),
        (with_("integrator", t_final=0.0), "t_final"),
        (with_("penalties", kappa=-1.0), "kappa"),
        (with_("penalties", M=1.5), "integer"),
        (with_("interpolation", mode="spline"), "mode"),
        (with_("bc", kind="periodic"), "bc.kind"),
        (with_("output", cadence=0), "cadence"),
        (with_("grid", n_u="30"), "integer"),
        ({**MINIMAL, "extra": 1}, "unknown top-level"),
        ({k: v for k, v in MINIMAL.items() if k != "grid"}, "missing section"),
        (with_("integrator", t_final=None) | {"integrator": {}}, "missing required key.*t_final"),
    ],
)
def test_validation_errors(data, match):
    with pytest.raises(ConfigError, match=match):
        config_from_dict(data)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "system": {"name": "burgers"},\n  "grid": {,}\n}\n')
    with pytest.raises(ConfigError, match=r"bad.json:3:"):
        load_config(p)


def test_roundtrip_fixed_point(tmp_path):
    for name in ("burgers_smooth", "burgers_eta_sweep", "sw_lake_at_rest", "euler_density_pulse"):
        cfg = load_config(preset_path(name))
        again = load_config(dump_config(cfg, tmp_path / f"{name}.json"))
        assert again == cfg
        assert again.to_json() == cfg.to_json()


def test_replace():
    cfg = config_from_dict(MINIMAL)
    new = cfg.replace(grid={"n_u": 60}, seed=4)
    assert new.grid.n_u == 60 and new.grid.n_v == 30 and new.seed == 4
    assert cfg.grid.n_u == 30
