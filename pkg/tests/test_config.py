import pytest

from trapcc.config import (RunConfig, ScanConfig, Tolerances, load_config, parse_config_text,
                           with_tolerances)
from trapcc.errors import ConfigError


def test_defaults():
    cfg = parse_config_text("")
    assert cfg == RunConfig()
    assert cfg.scan.a_fixed == 8.0 and cfg.scan.c_steps == 50 and cfg.scan.d_steps == 50
    assert cfg.tol.root == 1e-13


def test_parse_all_sections():
    text = """
    # grid
    a_fixed = 10
    c_min = 1   # inline comment
    c_max = 9
    c_steps = 3
    tol_root = 1e-12
    tol_relation = 1e-9
    workers = 4
    format = json
    csv_path = out.csv
    """
    cfg = parse_config_text("\n".join(line.strip() for line in text.splitlines()))
    assert cfg.scan.a_fixed == 10.0
    assert cfg.scan.c_values() == [1.0, 5.0, 9.0]
    assert cfg.tol.root == 1e-12 and cfg.tol.relation == 1e-9
    assert (cfg.workers, cfg.format, cfg.csv_path) == (4, "json", "out.csv")


@pytest.mark.parametrize("text,match", [
    ("bogus = 1", "unknown key"),
    ("c_steps = many", "bad value"),
    ("format = xml", "format"),
    ("workers = 0", "workers"),
    ("c_max = 9", "c_max"),
    ("c_min = 5\nc_max = 4", "c_min"),
    ("d_steps = 0", "d_steps"),
    ("no equals sign here", "parsing"),
])
def test_invalid_configs(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config_text(text)


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("d_min = 7\nd_steps = 2\n")
    cfg = load_config(path)
    assert cfg.scan.d_values() == [7.0, 8.0]
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_tolerance_overrides():
    cfg = with_tolerances(RunConfig(), relation=1e-6, mass=None)
    assert cfg.tol.relation == 1e-6
    assert cfg.tol.mass == Tolerances().mass
    assert with_tolerances(cfg) is cfg


def test_single_point_grid():
    cfg = ScanConfig(c_min=2.0, c_max=2.0, c_steps=1, d_min=7.0, d_max=7.0, d_steps=1)
    assert cfg.c_values() == [2.0] and cfg.d_values() == [7.0]
