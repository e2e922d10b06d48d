"""Probabilistic states on scenarios."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .assign import ZeroOneState
from .linalg import DensityMatrix, LinalgError, maximally_mixed, pure
from .scenario import Scenario, ScenarioError

EPS_STATE = 1e-7
TAU_ZERO = 1e-10


class StateError(ValueError):
    """A vertex weighting that is not a state on the scenario."""

    def __init__(self, message: str, violations: list[tuple[str, float]] | None = None):
        super().__init__(message)
        self.violations = violations or []


@dataclass(frozen=True, eq=False)
class GraphState:
    """Vertex probabilities summing to 1 on every maximal clique."""

    scenario: Scenario
    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def __getitem__(self, v: int | str) -> float:
        if isinstance(v, str):
            v = self.scenario.index(v)
        return float(self.probs[v])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(x) for lab, x in zip(self.scenario.labels, self.probs)}

    def __repr__(self) -> str:
        return f"GraphState({self.scenario.name or '?'}, {self.scenario.n} vertices)"


@dataclass(frozen=True)
class EventRef:
    """A join of atoms lying in one common maximal clique."""

    atoms: frozenset[int]


def _as_array(s: Scenario, p) -> np.ndarray:
    if isinstance(p, GraphState):
        return np.array(p.probs)
    if isinstance(p, Mapping):
        missing = [lab for lab in s.labels if lab not in p]
        unknown = [k for k in p if k not in s.labels]
        if unknown:
            raise StateError(f"unknown vertex labels: {', '.join(map(str, unknown[:5]))}")
        if missing:
            raise StateError(f"state is missing vertices: {', '.join(missing[:5])}")
        return np.array([float(p[lab]) for lab in s.labels])
    arr = np.asarray(p, dtype=float).ravel()
    if arr.size != s.n:
        raise StateError(f"state has {arr.size} entries for {s.n} vertices")
    return arr


def clique_violations(s: Scenario, probs: np.ndarray, eps: float = EPS_STATE) -> list[tuple[str, float]]:
    out = []
    for c in s.cliques:
        total = float(probs[list(c)].sum())
        if abs(total - 1) >= eps:
            out.append(("{" + ",".join(s.labels[v] for v in c) + "}", total))
    return out


def validate_state(s: Scenario, p, eps: float = EPS_STATE) -> GraphState:
    """Check clique sums and ranges, clamp to [0, 1] and wrap as a GraphState."""
    arr = _as_array(s, p)
    if not np.all(np.isfinite(arr)):
        raise StateError("state has non-finite entries")
    low = [(s.labels[v], float(arr[v])) for v in np.flatnonzero((arr < -eps) | (arr > 1 + eps))]
    if low:
        lab, x = low[0]
        raise StateError(f"probability out of range at {lab}: {x:.9g}", low)
    bad = clique_violations(s, arr, eps)
    if bad:
        lab, total = bad[0]
        raise StateError(f"{len(bad)} maximal clique(s) do not sum to 1, e.g. {lab} sums to {total:.9g}", bad)
    return GraphState(s, np.clip(arr, 0.0, 1.0))


def induce(s: Scenario, rho: DensityMatrix) -> GraphState:
    """Born-rule probabilities of every atom."""
    if s.realization is None:
        raise ScenarioError("inducing a state needs a projector realization")
    if not s.is_valid:
        raise ScenarioError("quantum states only induce graph states on Valid scenarios")
    if rho.dim != s.realization.dim:
        raise LinalgError(f"density matrix has dimension {rho.dim}, scenario has {s.realization.dim}")
    mats = np.array([p.matrix for p in s.realization.projectors])
    vals = np.einsum("ij,vji->v", rho.matrix, mats).real
    if np.any(vals < -1e-9) or np.any(vals > 1 + 1e-9):
        raise LinalgError("Born probability outside [0, 1]")
    return validate_state(s, np.clip(vals, 0.0, 1.0))


def from_zero_one(s: Scenario, z: ZeroOneState) -> GraphState:
    return GraphState(s, z.vector(s.n))


def event(s: Scenario, atoms: Iterable[int | str]) -> EventRef:
    idx = frozenset(s.index(a) if isinstance(a, str) else int(a) for a in atoms)
    if any(not 0 <= v < s.n for v in idx):
        raise StateError("event refers to an unknown vertex")
    # pairwise adjacent atoms always lie in a common maximal clique
    members = sorted(idx)
    sub = s.adjacency[np.ix_(members, members)]
    if int(sub.sum()) != len(members) * (len(members) - 1):
        raise StateError("event atoms do not lie in a common maximal clique")
    return EventRef(idx)


def event_prob(p: GraphState, e: EventRef) -> float:
    return float(sum(p.probs[v] for v in e.atoms))


def event_value(z: ZeroOneState, e: EventRef) -> int:
    return int(bool(z.support & e.atoms))


def support(p: GraphState, tau: float = TAU_ZERO) -> frozenset[int]:
    return frozenset(int(v) for v in np.flatnonzero(p.probs > tau))


__all__ = [
    "EPS_STATE",
    "TAU_ZERO",
    "EventRef",
    "GraphState",
    "StateError",
    "clique_violations",
    "event",
    "event_prob",
    "event_value",
    "from_zero_one",
    "induce",
    "maximally_mixed",
    "pure",
    "support",
    "validate_state",
]
