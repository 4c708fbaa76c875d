import json
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trapcc.ccsystem import MassVector, evaluate, mass_ratios
from trapcc.config import ScanConfig
from trapcc.errors import DegenerateDenominator
from trapcc.geometry import DistanceVector, check_omega
from trapcc.golden import golden
from trapcc.verify import (decreasing_ratio, golden_corpus, random_omega_trapezoids, run_suites,
                           verify_decreasing_ratio, verify_decreasing_ratio_corpus,
                           verify_diagonal_gap, verify_gradient_identity, verify_lemma_r3412,
                           verify_mass_ordering, verify_symmetry_propositions)


@pytest.fixture(scope="module")
def sample():
    return random_omega_trapezoids(300, seed=7)


def test_random_trapezoids_are_reproducible_and_ordered(sample):
    again = random_omega_trapezoids(300, seed=7)
    assert again == sample
    assert all(check_omega(r).in_omega for r in sample)
    assert random_omega_trapezoids(5, seed=8) != sample[:5]


# ---------------------------------------------------------------- mass ordering

def test_mass_ordering_on_goldens():
    rep = verify_mass_ordering([evaluate(golden(n)) for n in ("E1", "E2", "E3")])
    assert rep.passed and rep.cases_checked == 3
    assert rep.counts == {"m1_gt_m2": 1, "m1_lt_m2": 1}


def test_mass_ordering_flags_a_violation():
    sol = evaluate(golden("E1"))
    bad = replace(sol, masses=MassVector(1.0, 0.5, 0.9, 0.6))
    rep = verify_mass_ordering([sol, bad])
    assert not rep.passed
    assert len(rep.failures) == 1
    assert rep.failures[0]["solution"]["m2"] == 0.5


# ---------------------------------------------------------------- lemmas

def test_decreasing_ratio_examples():
    assert decreasing_ratio(1, 2, 3, 4) == pytest.approx((1 / 8 - 1 / 27) / (1 - 1 / 64))
    assert decreasing_ratio(1, 2, 3, 4) == pytest.approx(0.08936, abs=1e-5)
    assert decreasing_ratio(1, 1, 1, 2) == 0.0
    with pytest.raises(DegenerateDenominator):
        decreasing_ratio(2, 2, 2, 2)
    with pytest.raises(ValueError):
        verify_decreasing_ratio(3, 2, 1, 4)


def test_decreasing_ratio_equals_mass_ratio_on_e1():
    r = golden("E1")
    m = mass_ratios(r)
    value = decreasing_ratio(r.r23, r.r14, r.r24, r.r13)
    assert value == pytest.approx(m.m3 / m.m4, rel=1e-12)
    assert value <= 1


@given(st.lists(st.floats(0.01, 100.0), min_size=4, max_size=4, unique=True))
def test_decreasing_ratio_bounded_by_one(xs):
    assert verify_decreasing_ratio(*sorted(xs))


def test_lemma_suites_pass_on_random_trapezoids(sample):
    for rep in (verify_lemma_r3412(sample), verify_decreasing_ratio_corpus(sample),
                verify_diagonal_gap(sample)):
        assert rep.passed, rep.failures[:3]
        assert rep.cases_checked == len(sample)


def test_lemma_r3412_detects_violation_and_equality():
    bad = DistanceVector(r12=8, r13=10, r14=7, r23=2, r24=9, r34=4)
    assert not verify_lemma_r3412([bad]).passed
    para = DistanceVector.from_sides(3, 2, 3, 2, 4.0, 2.5)
    rep = verify_lemma_r3412([para])
    assert rep.passed


def test_gradient_identity_suite(sample):
    rep = verify_gradient_identity(golden_corpus() + sample[:50])
    assert rep.passed
    assert rep.max_slack_violation < 1e-6


# ---------------------------------------------------------------- symmetry

def test_symmetry_report():
    rep = verify_symmetry_propositions()
    assert rep.passed, (rep.failures, rep.solver_failures)
    text = " ".join(rep.notes)
    assert "boundary" in text
    assert "m1=m2 witness" in text


# ---------------------------------------------------------------- bundles

def test_run_suites_is_deterministic_and_serializable():
    cfg = ScanConfig(c_steps=10, d_steps=10)
    first = [rep.to_dict() for rep in run_suites(cfg, ("lemmas", "gradcheck"), samples=200)]
    second = [rep.to_dict() for rep in run_suites(cfg, ("lemmas", "gradcheck"), samples=200)]
    assert first == second
    json.dumps(first)
    assert [d["theorem"] for d in first] == ["lemma-r23-r14", "lemma-decreasing-ratio",
                                             "diagonal-gap", "gradient-parallel"]


def test_mass_ordering_suite_requires_both_orders():
    cfg = ScanConfig(c_steps=12, d_steps=12)
    (rep,) = run_suites(cfg, ("mass-ordering",))
    assert rep.passed
    assert rep.counts["m1_gt_m2"] > 0 and rep.counts["m1_lt_m2"] > 0
