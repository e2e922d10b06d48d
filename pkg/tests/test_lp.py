from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxlab.lp import (
    Constraint,
    LinearProgram,
    LPError,
    LPStatus,
    check_optimality,
    maximize,
    solve,
)

from oracles import highs_max


def vertex_max(c, A, b):
    """Best objective over all basic feasible points of ``A x <= b, x >= 0``."""
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    best = None
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            val = float(c @ x)
            best = val if best is None else max(best, val)
    return best


def test_single_bound():
    sol = maximize([1.0], A_ub=[[1.0]], b_ub=[1.0])
    assert sol.status is LPStatus.OPTIMAL and sol.value == pytest.approx(1.0)


def test_infeasible():
    assert maximize([1.0], A_ub=[[1.0]], b_ub=[-1.0]).status is LPStatus.INFEASIBLE


def test_degenerate_equality():
    sol = maximize([1.0, 1.0], A_eq=[[1.0, 1.0]], b_eq=[1.0])
    assert sol.status is LPStatus.OPTIMAL and sol.value == pytest.approx(1.0)


def test_unbounded():
    assert maximize([1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0]).status is LPStatus.UNBOUNDED


def test_ge_rows_and_duals():
    # min x + y with x + 2y >= 2, 3x + y >= 3, written as a maximization
    lp = LinearProgram.from_arrays([-1.0, -1.0], A_ge=[[1, 2], [3, 1]], b_ge=[2, 3])
    sol = solve(lp)
    assert sol.value == pytest.approx(-1.4)
    assert np.allclose(sol.primal, [0.8, 0.6])
    assert check_optimality(lp, sol) == []
    assert float(np.array([2, 3]) @ sol.dual) == pytest.approx(sol.value)


def test_redundant_equalities():
    lp = LinearProgram.from_arrays([1.0, 2.0], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    sol = solve(lp)
    assert sol.value == pytest.approx(2.0)
    assert check_optimality(lp, sol) == []


def test_validation():
    with pytest.raises(LPError):
        LinearProgram(np.array([]), ())
    with pytest.raises(LPError):
        LinearProgram(np.ones(2), (Constraint(np.ones(3), "<=", 1.0),))
    with pytest.raises(LPError):
        LinearProgram(np.ones(2), (Constraint(np.ones(2), "<", 1.0),))
    with pytest.raises(LPError):
        LinearProgram(np.array([np.inf]), ())


def test_no_constraints():
    assert maximize([-1.0, 0.0]).value == 0.0
    assert maximize([1.0]).status is LPStatus.UNBOUNDED


def test_cycling_example_terminates():
    # a classic degenerate program that cycles under the largest-coefficient rule
    c = [10, -57, -9, -24]
    A = [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]]
    sol = maximize(c, A_ub=A, b_ub=[0, 0, 1])
    assert sol.value == pytest.approx(1.0)


def _random_program(rng, m, n):
    A = rng.integers(-3, 6, size=(m, n)).astype(float)
    A = np.vstack([A, np.ones(n)])
    b = np.concatenate([rng.integers(-2, 9, size=m).astype(float), [10.0]])
    c = rng.integers(-4, 6, size=n).astype(float)
    return c, A, b


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.integers(1, 7))
def test_matches_vertex_enumeration(seed, m, n):
    c, A, b = _random_program(np.random.default_rng(seed), m, n)
    lp = LinearProgram.from_arrays(c, A_ub=A, b_ub=b)
    sol = solve(lp)
    want = vertex_max(c, A, b)
    if want is None:
        assert sol.status is LPStatus.INFEASIBLE
    else:
        assert sol.status is LPStatus.OPTIMAL
        assert sol.value == pytest.approx(want, abs=1e-6)
        assert check_optimality(lp, sol) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_highs_with_mixed_rows(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    c = rng.normal(size=n)
    A_ub = np.vstack([rng.normal(size=(3, n)), np.ones(n)])
    b_ub = np.concatenate([rng.normal(size=3) + 1, [5.0]])
    A_eq = rng.normal(size=(1, n))
    b_eq = rng.normal(size=1)
    lp = LinearProgram.from_arrays(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)
    sol = solve(lp)
    want = highs_max(c, A_ub, b_ub, A_eq, b_eq)
    if want == "infeasible":
        assert sol.status is LPStatus.INFEASIBLE
    else:
        assert sol.status is LPStatus.OPTIMAL
        assert sol.value == pytest.approx(want, abs=1e-6)
        assert check_optimality(lp, sol) == []


def test_determinism_bit_identical():
    rng = np.random.default_rng(11)
    c, A, b = _random_program(rng, 6, 8)
    s1 = maximize(c, A_ub=A, b_ub=b)
    s2 = maximize(c, A_ub=A, b_ub=b)
    assert s1.primal.tobytes() == s2.primal.tobytes()
    assert s1.dual.tobytes() == s2.dual.tobytes()
    assert s1.iterations == s2.iterations
