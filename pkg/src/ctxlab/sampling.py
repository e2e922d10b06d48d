"""Random density matrices and random graph states for property testing."""

from __future__ import annotations

import numpy as np

from .assign import enumerate_01
from .linalg import DensityMatrix
from .lp import LPStatus, solve
from .scenario import Scenario
from .states import GraphState, StateError, induce, validate_state

_SNAP = 1e-12


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed density matrix (full rank unless ``rank`` is given)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def extreme_state(s: Scenario, rng: np.random.Generator) -> GraphState | None:
    """A vertex of the state polytope, found by maximizing a random objective."""
    from .classify import state_polytope_lp

    sol = solve(state_polytope_lp(s, rng.normal(size=s.n)))
    if sol.status is not LPStatus.OPTIMAL:
        return None
    x = np.where(sol.primal < _SNAP, 0.0, sol.primal)
    try:
        return validate_state(s, x)
    except StateError:
        return None


def state_pool(s: Scenario, rng: np.random.Generator, n_extreme: int = 4, n_quantum: int = 3) -> list[GraphState]:
    pool: list[GraphState] = []
    e = enumerate_01(s, limit=2000)
    if len(e):
        picks = rng.choice(len(e), size=min(len(e), 64), replace=False)
        pool.extend(GraphState(s, e.states[int(k)].vector(s.n)) for k in sorted(picks))
    for _ in range(n_extreme):
        p = extreme_state(s, rng)
        if p is not None:
            pool.append(p)
    if s.realization is not None and s.is_valid:
        pool.extend(induce(s, random_density_matrix(s.realization.dim, rng)) for _ in range(n_quantum))
    return pool


def random_states(s: Scenario, rng: np.random.Generator, count: int, max_terms: int = 4) -> list[GraphState]:
    """Sparse convex mixtures of a state pool.

    Mixture weights are bounded away from zero so that every entry is either
    exactly zero or well above the support threshold.
    """
    pool = state_pool(s, rng)
    if not pool:
        return []
    out: list[GraphState] = []
    while len(out) < count:
        k = int(rng.integers(1, min(max_terms, len(pool)) + 1))
        idx = rng.choice(len(pool), size=k, replace=False)
        w = rng.dirichlet(np.ones(k)) + 0.05
        w /= w.sum()
        probs = sum(wi * pool[int(i)].probs for wi, i in zip(w, idx))
        probs = np.where(probs < _SNAP, 0.0, probs)
        out.append(validate_state(s, probs))
    return out
