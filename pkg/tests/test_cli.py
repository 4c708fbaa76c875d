import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from trapcc.cli import SCAN_COLUMNS, main
from trapcc.golden import GOLDEN_TEXT, ROUNDING_NOTE


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_golden_passes(capsys):
    code, out, _ = run(capsys, "validate", "--golden", "E1", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["valid"] and data["ok_in_omega"]
    assert data["meta"]["rounding"] == ROUNDING_NOTE


def test_validate_iso_fails_relation_only_on_dynamics(capsys):
    code, out, _ = run(capsys, "validate", "--golden", "ISO", "--format", "json")
    data = json.loads(out)
    assert code == 1
    assert data["ok_trapezoid"] and not data["ok_relation"]


def test_malformed_json_is_a_usage_error(capsys):
    code, _, err = run(capsys, "validate", "--json", '{"r12": 1,\n "r13": }')
    diag = json.loads(err)
    assert code == 2
    assert diag["kind"] == "usage"
    assert diag["line"] == 2 and diag["column"] > 1


def test_missing_keys_and_unknown_golden_are_usage_errors(capsys):
    assert run(capsys, "validate", "--json", '{"r12": 1}')[0] == 2
    assert run(capsys, "masses", "--golden", "E9")[0] == 2
    assert run(capsys, "masses")[0] == 2
    assert run(capsys, "masses", "--golden", "E1", "--json", "{}")[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["masses", "--format", "xml"])
    assert info.value.code == 2


def test_input_file_and_shape_keys(capsys, tmp_path):
    path = tmp_path / "e1.json"
    path.write_text(json.dumps(GOLDEN_TEXT["E1"]))
    code, out, _ = run(capsys, "masses", "--input", str(path), "--format", "json")
    assert code == 0
    assert json.loads(out)["m1/m2"] == pytest.approx(1.0194571510769873907, rel=1e-9)
    code, out, _ = run(capsys, "validate", "--json", '{"a": 2, "b": 1, "c": 1, "d": 1}',
                       "--format", "json")
    assert json.loads(out)["r13"] == pytest.approx(math.sqrt(3))


@pytest.mark.parametrize("name,r12,r14", [
    ("E1", 1.0194571510769873907, 7.9942119368105807422),
    ("E2", 0.69074480337446980353, 0.87696321790891338292),
])
def test_masses_golden(capsys, name, r12, r14):
    code, out, _ = run(capsys, "masses", "--golden", name, "--format", "json", "--check")
    data = json.loads(out)
    assert code == 0
    assert data["m1/m2"] == pytest.approx(r12, rel=1e-9)
    assert data["m1/m4"] == pytest.approx(r14, rel=1e-9)


def test_masses_square_csv(capsys):
    code, out, _ = run(capsys, "masses", "--golden", "SQ", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(row[k]) for k in ("m1", "m2", "m3", "m4")] == pytest.approx([1, 1, 1, 1])


def test_masses_refuses_non_solution_unless_forced(capsys):
    code, out, err = run(capsys, "masses", "--golden", "ISO")
    assert code == 1 and out == "" and "--force" in err
    code, out, _ = run(capsys, "masses", "--golden", "ISO", "--force")
    assert code == 0 and "lambda" in out
    assert run(capsys, "masses", "--golden", "ISO", "--tol-relation", "2")[0] == 0


def small_grid(tmp_path, **extra):
    lines = {"c_min": 1.0, "c_max": 7.0, "c_steps": 7, "d_min": 6.5, "d_max": 8.0, "d_steps": 7}
    lines.update(extra)
    path = tmp_path / "grid.cfg"
    path.write_text("".join(f"{k} = {v}\n" for k, v in lines.items()))
    return str(path)


def test_scan_csv_and_summary(capsys, tmp_path):
    cfg = small_grid(tmp_path)
    out_csv, out_json = tmp_path / "rows.csv", tmp_path / "summary.json"
    code, _, _ = run(capsys, "scan", "--config", cfg, "--csv", str(out_csv), "--summary",
                     str(out_json), "--check")
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert tuple(rows[0]) == SCAN_COLUMNS
    summary = json.loads(out_json.read_text())
    assert summary["accepted"] == len(rows) - 1 > 0
    assert summary["cells"] == 49
    assert summary["mass_range"]["m1"] == {"min": 1.0, "max": 1.0}
    assert summary["mass_ordering"]["passed"]
    assert sum(summary["failures"].values()) > 0


def test_scan_workers_give_identical_bytes(capsys, tmp_path):
    cfg = small_grid(tmp_path)
    paths = []
    for workers in ("1", "3"):
        path = tmp_path / f"w{workers}.csv"
        assert run(capsys, "scan", "--config", cfg, "--workers", workers, "--csv", str(path),
                   "--summary", str(tmp_path / "s.json"))[0] == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1]


def test_scan_empty_region(capsys, tmp_path):
    code, out, err = run(capsys, "scan", "--set", "c_min=1", "--set", "c_max=2", "--set",
                         "c_steps=1", "--set", "d_min=1", "--set", "d_max=1.5", "--set",
                         "d_steps=2")
    assert code == 0
    assert out.strip() == ",".join(SCAN_COLUMNS)
    summary = json.loads(err)
    assert summary["accepted"] == 0 and "note" in summary


def test_scan_rejects_bad_config(capsys, tmp_path):
    code, _, err = run(capsys, "scan", "--config", small_grid(tmp_path, bogus=1))
    assert code == 2 and "bogus" in err


def test_solve_equal_mass(capsys):
    code, out, _ = run(capsys, "solve-equal-mass", "--pair", "3,4", "--init", "3,7.5",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert abs(data["r14"] - data["r23"]) < 1e-7
    code, out, _ = run(capsys, "solve-equal-mass", "--pair", "2,4", "--format", "json")
    assert code == 1 and json.loads(out)["status"] == "outside_omega"
    assert run(capsys, "solve-equal-mass", "--pair", "1,1")[0] == 2


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gradcheck", "--samples", "20")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--samples", "50", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"] and len(data["reports"]) == 3


def test_gradcheck_command(capsys):
    code, out, _ = run(capsys, "gradcheck", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert [row["name"] for row in data["results"]] == ["E1", "E2", "E3", "SQ", "ISO"]
    assert run(capsys, "gradcheck", "--golden", "E2", "--tol", "1e-30")[0] == 1


def test_embed_square_and_file_output(capsys, tmp_path):
    code, out, _ = run(capsys, "embed", "--golden", "SQ")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["label", "x", "y"]
    assert [r[0] for r in rows[1:]] == ["p1", "p2", "p3", "p4"]
    pts = [(float(x), float(y)) for _, x, y in rows[1:]]
    assert np.allclose(pts, [(0, 0), (1, 0), (1, 1), (0, 1)], atol=1e-15, rtol=0)
    path = tmp_path / "e3.csv"
    code, _, err = run(capsys, "embed", "--golden", "E3", "--output", str(path), "--check")
    assert code == 0 and "round trip ok" in err
    pts = {row["label"]: (float(row["x"]), float(row["y"])) for row in csv.DictReader(path.open())}
    assert pts["p2"][0] == 8.0
    assert pts["p3"][0] - pts["p4"][0] == pytest.approx(4.37871386495945262, rel=1e-12)
    assert pts["p3"][1] == pytest.approx(7.0, rel=1e-12)


def test_embed_error_surfaces(capsys):
    code, _, err = run(capsys, "embed", "--json",
                       '{"r12": 1, "r13": 1, "r14": 1, "r23": 1, "r24": 1, "r34": 1}')
    assert code == 1
    assert json.loads(err)["kind"] != "usage"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "trapcc", "masses", "--golden", "E2",
                           "--format", "json"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["m1/m4"] == pytest.approx(0.87696321790891338292, rel=1e-9)
