"""Acceptance criteria, one test each.

Every test prints a ``[PASS]`` or ``[FAIL]`` line with the individual checks
below it; the lines are repeated in the terminal summary.
"""

from __future__ import annotations

from ctxlab import acceptance

from conftest import record_criterion


def _run(fn):
    r = fn()
    print(r.summary())
    for line in r.lines:
        print("    " + line)
    record_criterion(r.summary())
    assert r.passed, "\n".join([r.summary()] + r.lines)


def test_criterion_1_ceg18_ks_set():
    _run(acceptance.criterion_1)


def test_criterion_2_ceg17_assignment_and_saturation():
    _run(acceptance.criterion_2)


def test_criterion_3_kcbs():
    _run(acceptance.criterion_3)


def test_criterion_4_chsh():
    _run(acceptance.criterion_4)


def test_criterion_5_ghz_and_hardy():
    _run(acceptance.criterion_5)


def test_criterion_6_yu_oh():
    _run(acceptance.criterion_6)


def test_criterion_7a_membership_oracle():
    _run(acceptance.criterion_7a)


def test_criterion_7b_strong_iff_maximal():
    _run(acceptance.criterion_7b)


def test_criterion_7c_ks_sisc():
    _run(acceptance.criterion_7c)


def test_criterion_7d_hierarchy():
    _run(acceptance.criterion_7d)


def test_criterion_7e_monotonicity_and_exclusivity():
    _run(acceptance.criterion_7e)


def test_criterion_8_abstract_scenarios():
    _run(acceptance.criterion_8)


def test_criterion_9_lp_solver():
    _run(acceptance.criterion_9)
