from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxlab.assign import enumerate_01
from ctxlab.catalog import builtin
from ctxlab.classify import (
    AnalysisRefused,
    HierarchyError,
    InequalitySpec,
    algebraic_bound,
    check_hierarchy,
    classify,
    eval_inequality,
    is_fully_contextual_witness,
    is_logically_contextual,
    is_maximally_contextual,
    is_noncontextual,
    is_strongly_contextual,
    ks_sisc_check,
    nc_bound,
    noncontextual_fraction,
)
from ctxlab.linalg import maximally_mixed
from ctxlab.lp import EPS_LP
from ctxlab.sampling import random_density_matrix, random_states
from ctxlab.scenario import ScenarioError
from ctxlab.states import GraphState, from_zero_one, induce, validate_state

from oracles import event_level_logical, event_level_strong, highs_wnc, nnls_member
from test_scenario import complete_graph, cycle

SQ2, SQ5 = math.sqrt(2), math.sqrt(5)

# fractions pinned with an independent LP solver (scipy HiGHS) over brute-force 0-1 states
W_NC_SINGLET = 2 - SQ2
W_NC_KCBS = 5 - 2 * SQ5
W_NC_HARDY = 23 / 24


def entry_state(name, state):
    e = builtin(name)
    return e.scenario, e.states[state]


def test_zero_one_states_are_noncontextual():
    s = builtin("chsh").scenario
    for z in enumerate_01(s):
        fr = noncontextual_fraction(s, from_zero_one(s, z))
        assert fr.w_nc == pytest.approx(1.0, abs=EPS_LP)
        assert not is_logically_contextual(s, from_zero_one(s, z))[0]


def test_pr_box_fraction_zero():
    s, p = entry_state("chsh", "pr_box")
    assert noncontextual_fraction(s, p).w_nc == pytest.approx(0.0, abs=EPS_LP)
    # no 0-1 state fits inside the PR support
    sup = set(np.flatnonzero(p.probs))
    assert not any(z.support <= sup for z in enumerate_01(s))


def test_ceg18_any_quantum_state_fraction_zero():
    s = builtin("ceg18").scenario
    rng = np.random.default_rng(3)
    for _ in range(3):
        p = induce(s, random_density_matrix(4, rng))
        assert noncontextual_fraction(s, p).w_nc == 0.0
        assert is_strongly_contextual(s, p)


def test_pinned_fractions():
    cases = [("chsh", "singlet", W_NC_SINGLET), ("kcbs", "kcbs", W_NC_KCBS), ("chsh", "hardy", W_NC_HARDY)]
    for name, state, want in cases:
        s, p = entry_state(name, state)
        assert noncontextual_fraction(s, p).w_nc == pytest.approx(want, abs=1e-9)


def test_fraction_certificates():
    for name, state in [("chsh", "singlet"), ("kcbs", "kcbs"), ("chsh", "hardy"), ("ghz322", "ghz")]:
        s, p = entry_state(name, state)
        e = enumerate_01(s)
        fr = noncontextual_fraction(s, p, states=e)
        recon = sum(w * z.vector(s.n) for z, w in fr.decomposition)
        assert np.all(recon <= p.probs + EPS_LP)
        assert sum(w for _, w in fr.decomposition) == pytest.approx(fr.w_nc, abs=EPS_LP)
        # dual: y.delta >= 1 on every 0-1 state and y.p = w_nc
        for z in e:
            assert fr.dual[list(z.support)].sum() >= 1 - EPS_LP
        assert float(fr.dual @ p.probs) == pytest.approx(fr.w_nc, abs=EPS_LP)
        if fr.residual is not None:
            validate_state(s, fr.residual.probs)


def test_membership_examples():
    tri = builtin("triangle")
    assert is_noncontextual(tri.scenario, tri.states["maximally_mixed"]).noncontextual
    for name, state in [("kcbs", "kcbs"), ("chsh", "singlet")]:
        s, p = entry_state(name, state)
        m = is_noncontextual(s, p)
        assert not m.noncontextual
        # the returned certificate is violated by p and respected by every 0-1 state
        assert eval_inequality(s, m.violated, p) > m.violated_bound
        assert nc_bound(s, m.violated) <= m.violated_bound + EPS_LP


def test_logical_examples():
    s, p = entry_state("chsh", "hardy")
    assert is_logically_contextual(s, p) == (True, s.index("++|ZS"))
    s, p = entry_state("kcbs", "kcbs")
    assert is_logically_contextual(s, p) == (False, None)


def test_strong_examples():
    s, p = entry_state("ghz322", "ghz")
    assert is_strongly_contextual(s, p)
    s, p = entry_state("chsh", "hardy")
    assert not is_strongly_contextual(s, p)


def test_maximal_examples():
    s, p = entry_state("chsh", "pr_box")
    assert is_maximally_contextual(s, p)
    s, p = entry_state("chsh", "singlet")
    assert not is_maximally_contextual(s, p)
    s, p = entry_state("ghz322", "ghz")
    assert is_maximally_contextual(s, p)


def test_inequality_examples():
    e = builtin("chsh")
    ineq = e.inequalities["chsh"]
    assert nc_bound(e.scenario, ineq) == 3
    assert eval_inequality(e.scenario, ineq, e.states["singlet"]) == pytest.approx(2 + SQ2, abs=1e-9)
    assert algebraic_bound(e.scenario, ineq) == pytest.approx(4, abs=1e-7)
    k = builtin("kcbs")
    ineq = k.inequalities["kcbs"]
    assert nc_bound(k.scenario, ineq) == 2
    assert eval_inequality(k.scenario, ineq, k.states["kcbs"]) == pytest.approx(SQ5, abs=1e-9)
    assert algebraic_bound(k.scenario, ineq) == pytest.approx(2.5, abs=1e-7)
    y = builtin("yu_oh")
    ineq = y.inequalities["yu_oh"]
    assert nc_bound(y.scenario, ineq) == 1
    rng = np.random.default_rng(5)
    for _ in range(3):
        p = induce(y.scenario, random_density_matrix(3, rng))
        assert eval_inequality(y.scenario, ineq, p) == pytest.approx(4 / 3, abs=1e-9)


def test_unknown_inequality_label():
    with pytest.raises(KeyError):
        InequalitySpec({"nope": 1.0}).vector(builtin("kcbs").scenario)
    with pytest.raises(ValueError):
        InequalitySpec({})


def test_empty_states_bound():
    s = cycle(5)
    ineq = InequalitySpec({lab: 1.0 for lab in s.labels})
    assert nc_bound(s, ineq) == float("-inf")
    assert algebraic_bound(s, ineq) == pytest.approx(2.5)


def test_full_contextuality_examples():
    e = builtin("chsh")
    ineq = e.inequalities["chsh"]
    assert is_fully_contextual_witness(e.scenario, e.states["pr_box"], ineq)
    assert not is_fully_contextual_witness(e.scenario, e.states["singlet"], ineq)
    k = builtin("kcbs")
    assert is_fully_contextual_witness(k.scenario, k.states["half_cycle"], k.inequalities["kcbs"])


def test_classify_examples():
    s, p = entry_state("chsh", "singlet")
    r = classify(s, p)
    assert r.contextual and not r.logically_contextual and not r.strongly_contextual
    assert 0 < r.contextual_fraction < 1
    s, p = entry_state("chsh", "hardy")
    r = classify(s, p)
    assert r.logically_contextual and not r.strongly_contextual
    assert r.strong_witness is not None


def test_ks_sisc_examples():
    assert ks_sisc_check(builtin("ceg18").scenario) == (True, True)
    assert ks_sisc_check(builtin("yu_oh").scenario) == (False, False)
    with pytest.raises(ScenarioError):
        ks_sisc_check(cycle(5))


def test_truncation_refused():
    s, p = entry_state("chsh", "singlet")
    with pytest.raises(AnalysisRefused):
        noncontextual_fraction(s, p, limit=3)


def test_hierarchy_checker():
    good = dict(noncontextual=False, contextual=True, logically_contextual=True,
                strongly_contextual=True, maximally_contextual=True)
    check_hierarchy(good)
    with pytest.raises(HierarchyError):
        check_hierarchy({**good, "logically_contextual": False})
    with pytest.raises(HierarchyError):
        check_hierarchy({**good, "maximally_contextual": False})


SMALL = ["kcbs", "shared_event_d3", "triangle", "cycle5", "cycle7"]


def _small(name):
    if name == "k4":
        return complete_graph(4)
    return builtin(name).scenario


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SMALL + ["k4"]))
def test_membership_matches_nnls_oracle(seed, name):
    s = _small(name)
    rng = np.random.default_rng(seed)
    e = enumerate_01(s)
    sets = [z.support for z in e]
    for p in random_states(s, rng, 4):
        got = is_noncontextual(s, p, states=e).noncontextual
        assert got == nnls_member(s.n, sets, p.probs)
        assert noncontextual_fraction(s, p, states=e).w_nc == pytest.approx(highs_wnc(s.n, sets, p.probs), abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SMALL + ["k4"]))
def test_event_level_matches_atom_level(seed, name):
    s = _small(name)
    rng = np.random.default_rng(seed)
    sets = [z.support for z in enumerate_01(s)]
    for p in random_states(s, rng, 4):
        assert is_logically_contextual(s, p)[0] == event_level_logical(s.cliques, sets, p.probs)
        assert is_strongly_contextual(s, p) == event_level_strong(s.cliques, sets, p.probs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["chsh", "kcbs", "yu_oh", "hardy", "shared_event_d3"]))
def test_strong_and_full_properties_on_random_states(seed, name):
    e = builtin(name)
    s = e.scenario
    rng = np.random.default_rng(seed)
    states = enumerate_01(s)
    for p in random_states(s, rng, 4):
        r = classify(s, p, states=states)
        assert r.strongly_contextual == (r.fraction.w_nc <= EPS_LP)
        for ineq in e.inequalities.values():
            if is_fully_contextual_witness(s, p, ineq, states=states):
                assert r.fraction.w_nc <= EPS_LP


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.sampled_from([("chsh", "chsh", "pr_box"), ("kcbs", "kcbs", "half_cycle"),
                                             ("chsh", "chsh", "singlet")]))
def test_bounds_positively_homogeneous(c, case):
    name, ineq_name, state = case
    e = builtin(name)
    ineq = e.inequalities[ineq_name]
    s, p = e.scenario, e.states[state]
    assert nc_bound(s, ineq.scaled(c)) == pytest.approx(c * nc_bound(s, ineq), rel=1e-9)
    assert algebraic_bound(s, ineq.scaled(c)) == pytest.approx(c * algebraic_bound(s, ineq), rel=1e-7)
    assert is_fully_contextual_witness(s, p, ineq.scaled(c)) == is_fully_contextual_witness(s, p, ineq)


def test_ks_strong_on_ceg():
    s = builtin("ceg18").scenario
    rng = np.random.default_rng(9)
    for p in random_states(s, rng, 10):
        assert is_strongly_contextual(s, p)
    assert is_strongly_contextual(s, induce(s, maximally_mixed(4)))


def test_graph_state_on_abstract_cycle():
    s = cycle(5)
    p = GraphState(s, np.full(5, 0.5))
    r = classify(s, p)
    assert r.strongly_contextual and r.contextual_fraction == 1.0
