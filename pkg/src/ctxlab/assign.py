"""Deterministic global assignments: 0-1 states and KS assignments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .scenario import Scenario, ScenarioError, validate

DEFAULT_LIMIT = 100_000


@dataclass(frozen=True)
class ZeroOneState:
    """A 0-1 state, stored as the set of vertices assigned 1."""

    support: frozenset[int]

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "ZeroOneState":
        return cls(frozenset(int(v) for v in vertices))

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.support))

    def vector(self, n: int) -> np.ndarray:
        v = np.zeros(n)
        v[list(self.support)] = 1.0
        return v

    def labels(self, s: Scenario) -> list[str]:
        return [s.labels[v] for v in self.sorted()]

    def __lt__(self, other: "ZeroOneState") -> bool:
        return self.sorted() < other.sorted()


@dataclass(frozen=True)
class Enumeration:
    states: tuple[ZeroOneState, ...]
    truncated: bool
    limit: int | None
    nodes_explored: int

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


@dataclass(frozen=True)
class KSCertificate:
    contextual: bool
    witness: ZeroOneState | None
    nodes_explored: int


@dataclass(frozen=True)
class KSAssignment:
    ones: frozenset[int]
    nodes_explored: int

    def values(self, n: int) -> dict[int, int]:
        return {v: int(v in self.ones) for v in range(n)}


def is_zero_one_state(s: Scenario, vertices: Iterable[int]) -> bool:
    sup = set(vertices)
    return all(len(sup.intersection(c)) == 1 for c in s.cliques)


class _Search:
    """Backtracking over cliques: each unhit clique must receive exactly one chosen vertex.

    Choosing a vertex bans its neighbours, so every clique gets at most one;
    a clique with no chosen and no available vertex triggers a backtrack.
    """

    def __init__(self, neighbors: Sequence[int], cliques: Sequence[Sequence[int]]):
        masks = []
        for k, c in enumerate(cliques):
            m = 0
            for v in c:
                m |= 1 << v
            masks.append((len(c), k, m, tuple(sorted(c))))
        masks.sort(key=lambda t: (t[0], t[1]))
        self.nbr = neighbors
        self.masks = [m for _, _, m, _ in masks]
        self.members = [c for _, _, _, c in masks]
        self.nodes = 0

    def run(self, allowed: int, forced: int = 0, limit: int | None = None) -> tuple[list[int], bool]:
        out: list[int] = []
        banned = ~allowed
        chosen = 0
        for v in _iter_bits(forced):
            if not allowed >> v & 1 or chosen & self.nbr[v]:
                return out, False
            chosen |= 1 << v
            banned |= self.nbr[v]
        truncated = False

        def rec(chosen: int, banned: int) -> bool:
            nonlocal truncated
            self.nodes += 1
            target = -1
            for k, m in enumerate(self.masks):
                if m & chosen:
                    continue
                if not m & ~banned:
                    return False
                if target < 0:
                    target = k
            if target < 0:
                if limit is not None and len(out) >= limit:
                    truncated = True
                    return True
                out.append(chosen)
                return False
            for v in self.members[target]:
                bit = 1 << v
                if banned & bit:
                    continue
                if rec(chosen | bit, banned | self.nbr[v] | bit):
                    return True
            return False

        rec(chosen, banned)
        return out, truncated


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _full(n: int) -> int:
    return (1 << n) - 1


def _to_state(mask: int) -> ZeroOneState:
    return ZeroOneState(frozenset(_iter_bits(mask)))


def enumerate_01(s: Scenario, limit: int | None = DEFAULT_LIMIT) -> Enumeration:
    """All 0-1 states in canonical (sorted support) order, truncated at ``limit``."""
    if limit is not None and limit < 0:
        raise ValueError("limit must be nonnegative")
    search = _Search(s.graph.neighbors, s.cliques)
    masks, truncated = search.run(_full(s.n), limit=limit)
    states = sorted(_to_state(m) for m in masks)
    return Enumeration(tuple(states), truncated, limit, search.nodes)


def find_01(s: Scenario, allowed: Iterable[int] | None = None, forced: Iterable[int] = ()) -> ZeroOneState | None:
    """First 0-1 state using only ``allowed`` vertices and containing all ``forced`` ones."""
    allow = _full(s.n)
    if allowed is not None:
        allow = 0
        for v in allowed:
            allow |= 1 << int(v)
    force = 0
    for v in forced:
        force |= 1 << int(v)
    if force & ~allow:
        return None
    search = _Search(s.graph.neighbors, s.cliques)
    masks, _ = search.run(allow, forced=force, limit=1)
    return _to_state(masks[0]) if masks else None


def is_ks_contextual(s: Scenario) -> KSCertificate:
    search = _Search(s.graph.neighbors, s.cliques)
    masks, _ = search.run(_full(s.n), limit=1)
    if masks:
        return KSCertificate(False, _to_state(masks[0]), search.nodes)
    return KSCertificate(True, None, search.nodes)


def complete_cliques(s: Scenario) -> list[tuple[int, ...]]:
    """Maximal cliques whose projectors sum to the identity (full bases)."""
    if s.realization is None:
        raise ScenarioError("KS-assignment search needs a projector realization")
    bad = set(validate(s).deficient)
    return [c for k, c in enumerate(s.cliques) if k not in bad]


def ks_assignment_search(s: Scenario) -> KSAssignment | None:
    """A {0,1} labelling: no two orthogonal vertices both 1, exactly one 1 per full basis.

    Returns None iff the vector set is a KS set. Vertices outside every full
    basis are set to 0 unless a basis needs them.
    """
    cliques = complete_cliques(s)
    search = _Search(s.graph.neighbors, cliques)
    masks, _ = search.run(_full(s.n), limit=1)
    if not masks:
        return None
    return KSAssignment(frozenset(_iter_bits(masks[0])), search.nodes)


def is_ks_assignment(s: Scenario, ones: Iterable[int]) -> bool:
    ones = set(ones)
    adj = s.adjacency
    if any(adj[u, v] for u in ones for v in ones if u < v):
        return False
    return all(len(ones.intersection(c)) == 1 for c in complete_cliques(s))
