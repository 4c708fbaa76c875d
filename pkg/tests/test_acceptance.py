"""Acceptance criteria, one test each.

Every criterion records a PASS/FAIL line that is printed at the end of the
pytest run. ``python tests/test_acceptance.py`` runs them without pytest.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

from trapcc.ccsystem import evaluate, gate_failures, relation_residual
from trapcc.cli import main as cli_main
from trapcc.config import ScanConfig
from trapcc.geometry import TrapezoidShape, cayley_menger, diagonals_from_sides, trapezoid_residual
from trapcc.golden import GOLDEN_RATIOS, golden
from trapcc.solver import scan_family, solve_b, solve_equal_mass
from trapcc.verify import (golden_corpus, random_omega_trapezoids, verify_decreasing_ratio_corpus,
                           verify_gradient_identity, verify_lemma_r3412, verify_mass_ordering)

RESULTS = []
_SCAN = {}


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def rel(x, y):
    return abs(x - y) / abs(y)


def default_scan():
    if "result" not in _SCAN:
        t0 = time.perf_counter()
        _SCAN["result"] = scan_family(ScanConfig())
        _SCAN["seconds"] = time.perf_counter() - t0
    return _SCAN["result"], _SCAN["seconds"]


# ---------------------------------------------------------------------------

def criterion_golden_mass_ratios():
    worst, slowest = 0.0, 0.0
    for name, (want12, want14) in GOLDEN_RATIOS.items():
        t0 = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "trapcc", "masses", "--golden", name,
                               "--format", "json"], capture_output=True, text=True, check=False)
        slowest = max(slowest, time.perf_counter() - t0)
        if proc.returncode != 0:
            return record(1, "golden mass ratios", False, f"{name} exit {proc.returncode}")
        data = json.loads(proc.stdout)
        worst = max(worst, rel(data["m1/m2"], float(want12)), rel(data["m1/m4"], float(want14)))
    ok = worst <= 1e-8 and slowest < 1.0
    return record(1, "golden mass ratios", ok,
                  f"max rel err {worst:.2e} (<= 1e-8), slowest run {slowest:.3f} s (< 1 s)")


def criterion_golden_residuals():
    worst = {"relation": 0.0, "trapezoid": 0.0, "cayley_menger": 0.0}
    for name in ("E1", "E2", "E3"):
        r = golden(name)
        worst["relation"] = max(worst["relation"], abs(relation_residual(r).normalized))
        worst["trapezoid"] = max(worst["trapezoid"], abs(trapezoid_residual(r).normalized))
        worst["cayley_menger"] = max(worst["cayley_menger"], abs(cayley_menger(r)) / r.r13**8)
    ok = (worst["relation"] <= 1e-10 and worst["trapezoid"] <= 1e-12
          and worst["cayley_menger"] <= 1e-10)
    return record(2, "golden constraint residuals", ok,
                  ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def criterion_diagonals():
    worst = 0.0
    for name in ("E1", "E3"):
        r = golden(name)
        e, f = diagonals_from_sides(TrapezoidShape(r.a, r.b, r.c, r.d))
        worst = max(worst, rel(e, r.r13), rel(f, r.r24))
    return record(3, "diagonal reconstruction", worst <= 1e-10, f"max rel err {worst:.1e}")


def criterion_solver_recovery():
    r = golden("E1")
    t0 = time.perf_counter()
    root = solve_b(8.0, r.c, r.d)
    ms = 1e3 * (time.perf_counter() - t0)
    err = rel(root.b, r.b)
    result, seconds = default_scan()
    rejected = [row for row in result.rows if gate_failures(row.solution, result.config.tol)]
    ok = err <= 1e-9 and ms < 100 and seconds < 60 and not rejected and result.rows
    return record(4, "solver recovery", ok,
                  f"b rel err {err:.1e} in {ms:.1f} ms; 50x50 scan {seconds:.1f} s, "
                  f"{len(result.rows)} accepted, {len(rejected)} failing gates")


def criterion_mass_ordering():
    result, _ = default_scan()
    rep = verify_mass_ordering(result.solutions(), 1e-10)
    above, below = rep.counts["m1_gt_m2"], rep.counts["m1_lt_m2"]
    ok = rep.passed and above > 0 and below > 0
    return record(5, "mass ordering on scan corpus", ok,
                  f"{rep.cases_checked} solutions, {len(rep.failures)} violations, "
                  f"m1>m2 in {above}, m1<m2 in {below}")


def criterion_symmetry():
    a = 8.0
    iso = solve_equal_mass((3, 4), (4.4, 7.6), a, 7.0)
    r, m = iso.distances, iso.masses
    iso_ok = abs(r.r14 - r.r23) < 1e-8 * a and abs(r.r13 - r.r24) < 1e-8 * a and abs(m.m1 - m.m2) < 1e-8
    wit = solve_equal_mass((1, 2), (4.4, 7.6), a, 7.0)
    ref = golden("E3")
    dev = max(rel(getattr(wit.distances, k), getattr(ref, k))
              for k in ("r13", "r14", "r23", "r24", "r34"))
    ok = iso_ok and dev <= 1e-6
    return record(6, "symmetry propositions", ok,
                  f"m3=m4: |r14-r23| {abs(r.r14 - r.r23):.1e}, |m1-m2| {abs(m.m1 - m.m2):.1e}; "
                  f"m1=m2 witness max rel dev from E3 {dev:.1e}")


def criterion_gradient_identity():
    corpus = golden_corpus() + random_omega_trapezoids(100, seed=1)
    rep = verify_gradient_identity(corpus, 1e-6)
    return record(7, "gradient identity", rep.passed,
                  f"{rep.cases_checked} trapezoids, max deviation {rep.max_slack_violation:.1e}")


def criterion_lemmas():
    corpus = random_omega_trapezoids(1000, seed=2)
    a = verify_lemma_r3412(corpus, tol=1e-12)
    b = verify_decreasing_ratio_corpus(corpus, tol=1e-12)
    ok = a.passed and b.passed
    return record(8, "lemma suites", ok,
                  f"1000 samples, violations {len(a.failures)} + {len(b.failures)}")


def criterion_determinism(tmp_dir: Path):
    blobs = []
    for workers in (1, 2):
        path = tmp_dir / f"scan_w{workers}.csv"
        code = cli_main(["scan", "--workers", str(workers), "--csv", str(path),
                         "--summary", str(tmp_dir / f"summary_w{workers}.json")])
        if code != 0:
            return record(9, "determinism", False, f"scan exit {code}")
        blobs.append(path.read_bytes())
    same = blobs[0] == blobs[1]
    return record(9, "determinism", same,
                  f"CSV with 1 vs 2 workers {'byte-identical' if same else 'DIFFERS'} "
                  f"({len(blobs[0])} bytes)")


# ---------------------------------------------------------------------------

def test_1_golden_mass_ratios():
    assert criterion_golden_mass_ratios()


def test_2_golden_constraint_residuals():
    assert criterion_golden_residuals()


def test_3_diagonal_reconstruction():
    assert criterion_diagonals()


def test_4_solver_recovery():
    assert criterion_solver_recovery()


def test_5_mass_ordering_on_scan_corpus():
    assert criterion_mass_ordering()


def test_6_symmetry_propositions():
    assert criterion_symmetry()


def test_7_gradient_identity():
    assert criterion_gradient_identity()


def test_8_lemma_suites():
    assert criterion_lemmas()


def test_9_scan_determinism(tmp_path):
    assert criterion_determinism(tmp_path)


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        oks = [criterion_golden_mass_ratios(), criterion_golden_residuals(), criterion_diagonals(),
               criterion_solver_recovery(), criterion_mass_ordering(), criterion_symmetry(),
               criterion_gradient_identity(), criterion_lemmas(), criterion_determinism(Path(tmp))]
    sys.exit(0 if all(oks) else 1)
