"""Scenarios as atom graphs, optionally realized by projectors.

A finite exclusive partial Boolean algebra is determined by its atom graph, so a
scenario is stored as that graph plus (optionally) one projector per vertex.
Maximal cliques of the graph are the maximal contexts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    EPS_MAT,
    Ket,
    LinalgError,
    Projector,
    as_matrix,
    clean_projector,
    fro,
    projector_from_ket,
)


class ScenarioError(ValueError):
    """Malformed scenario input."""


class ClosureLimitError(RuntimeError):
    def __init__(self, elements: int, rounds: int, limits: "ClosureLimits"):
        self.elements = elements
        self.rounds = rounds
        super().__init__(
            f"closure did not reach a fixpoint within limits "
            f"(max_elements={limits.max_elements}, max_rounds={limits.max_rounds}); "
            f"stopped with {elements} elements after {rounds} rounds"
        )


class Validity(enum.Enum):
    VALID = "valid"
    INCOMPLETE = "incomplete"
    UNCHECKED = "unchecked"


@dataclass(frozen=True)
class ValidityReport:
    status: Validity
    residuals: tuple[float, ...] = ()
    deficient: tuple[int, ...] = ()

    @property
    def is_valid(self) -> bool:
        return self.status is Validity.VALID


@dataclass(frozen=True)
class ClosureLimits:
    max_elements: int = 4096
    max_rounds: int = 64

    def __post_init__(self):
        if self.max_elements <= 0 or self.max_rounds <= 0:
            raise ValueError("closure limits must be positive")


# ---------------------------------------------------------------------------
# graphs


def _bitsets(adjacency: np.ndarray) -> tuple[int, ...]:
    out = []
    for row in adjacency:
        m = 0
        for j in np.flatnonzero(row):
            m |= 1 << int(j)
        out.append(m)
    return tuple(out)


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _check_adjacency(adjacency) -> np.ndarray:
    a = np.asarray(adjacency, dtype=bool)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ScenarioError("adjacency must be a square matrix")
    if np.any(np.diag(a)):
        raise ScenarioError("adjacency has self-loops")
    if not np.array_equal(a, a.T):
        raise ScenarioError("adjacency is not symmetric")
    return a


def maximal_cliques(adjacency) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with Tomita pivoting), canonically sorted."""
    a = _check_adjacency(adjacency)
    nbr = _bitsets(a)
    out: list[tuple[int, ...]] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(_bits(r)))
            return
        pivot = max(_bits(p | x), key=lambda u: (p & nbr[u]).bit_count())
        for v in list(_bits(p & ~nbr[pivot])):
            bit = 1 << v
            expand(r | bit, p & nbr[v], x & nbr[v])
            p &= ~bit
            x |= bit

    n = a.shape[0]
    if n:
        expand(0, (1 << n) - 1, 0)
    return sorted(out)


@dataclass(frozen=True, eq=False)
class AtomGraph:
    labels: tuple[str, ...]
    adjacency: np.ndarray
    cliques: tuple[tuple[int, ...], ...]
    neighbors: tuple[int, ...] = field(repr=False)

    @classmethod
    def build(cls, labels: Sequence[str], adjacency) -> "AtomGraph":
        a = _check_adjacency(adjacency).copy()
        if len(labels) != a.shape[0]:
            raise ScenarioError(f"{len(labels)} labels for {a.shape[0]} vertices")
        if len(set(labels)) != len(labels):
            raise ScenarioError("vertex labels must be unique")
        a.setflags(write=False)
        return cls(tuple(str(x) for x in labels), a, tuple(maximal_cliques(a)), _bitsets(a))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return list(zip(i.tolist(), j.tolist()))

    def degree(self, v: int) -> int:
        return int(self.adjacency[v].sum())

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.adjacency[u, v] for k, u in enumerate(vs) for v in vs[k + 1 :])


@dataclass(frozen=True)
class Realization:
    dim: int
    projectors: tuple[Projector, ...]


# one table row: (row label, ((column label, vertex), ...))
LayoutRow = tuple[str, tuple[tuple[str, int], ...]]


@dataclass(frozen=True, eq=False)
class Scenario:
    graph: AtomGraph
    realization: Realization | None = None
    validity: ValidityReport = ValidityReport(Validity.UNCHECKED)
    name: str = ""
    layout: tuple[LayoutRow, ...] | None = None

    @property
    def labels(self) -> tuple[str, ...]:
        return self.graph.labels

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def cliques(self) -> tuple[tuple[int, ...], ...]:
        return self.graph.cliques

    @property
    def adjacency(self) -> np.ndarray:
        return self.graph.adjacency

    @property
    def dim(self) -> int | None:
        return None if self.realization is None else self.realization.dim

    @property
    def is_valid(self) -> bool:
        return self.validity.is_valid

    def index(self, label: str) -> int:
        try:
            return self.graph.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown vertex label {label!r}") from None

    def projector(self, v: int | str) -> Projector:
        if self.realization is None:
            raise ScenarioError("scenario has no projector realization")
        if isinstance(v, str):
            v = self.index(v)
        return self.realization.projectors[v]

    def relabel(self, mapping: dict[str, str]) -> "Scenario":
        labels = [mapping.get(x, x) for x in self.labels]
        graph = AtomGraph(tuple(labels), self.graph.adjacency, self.graph.cliques, self.graph.neighbors)
        if len(set(labels)) != len(labels):
            raise ScenarioError("relabeling produced duplicate labels")
        return replace(self, graph=graph)

    def with_layout(self, layout: Sequence[LayoutRow] | None) -> "Scenario":
        if layout is not None:
            layout = tuple((str(r), tuple((str(c), int(v)) for c, v in cols)) for r, cols in layout)
            for _, cols in layout:
                if any(not 0 <= v < self.n for _, v in cols):
                    raise ScenarioError("layout refers to an unknown vertex")
        return replace(self, layout=layout)

    def named(self, name: str) -> "Scenario":
        return replace(self, name=name)

    def __repr__(self) -> str:
        kind = "abstract" if self.realization is None else f"dim={self.dim}"
        return (
            f"Scenario({self.name or '?'}: {self.n} atoms, {len(self.cliques)} maximal cliques, "
            f"{kind}, {self.validity.status.value})"
        )


# ---------------------------------------------------------------------------
# construction


def _orthogonality(mats: Sequence[np.ndarray]) -> np.ndarray:
    stack = np.array(mats)
    n = len(stack)
    prods = np.einsum("iab,jbc->ijac", stack, stack)
    adj = np.linalg.norm(prods.reshape(n, n, -1), axis=2) < EPS_MAT
    np.fill_diagonal(adj, False)
    return adj | adj.T


def validate(s: Scenario) -> ValidityReport:
    """Per maximal clique, the Frobenius distance of its projector sum from the identity."""
    if s.realization is None:
        return ValidityReport(Validity.UNCHECKED)
    eye = np.eye(s.realization.dim)
    mats = [p.matrix for p in s.realization.projectors]
    residuals = tuple(fro(sum(mats[v] for v in c) - eye) for c in s.cliques)
    deficient = tuple(k for k, r in enumerate(residuals) if r >= EPS_MAT)
    status = Validity.INCOMPLETE if deficient else Validity.VALID
    return ValidityReport(status, residuals, deficient)


def from_projectors(projectors: Sequence[Projector], labels: Sequence[str], name: str = "") -> Scenario:
    """Realized scenario with orthogonality adjacency (no closure applied)."""
    if not projectors:
        raise ScenarioError("a scenario needs at least one projector")
    dims = {p.dim for p in projectors}
    if len(dims) != 1:
        raise ScenarioError(f"projector dimensions differ: {sorted(dims)}")
    if any(p.rank == 0 for p in projectors):
        raise ScenarioError("zero projector cannot be an atom")
    mats = [p.matrix for p in projectors]
    for i in range(len(mats)):
        for j in range(i):
            if fro(mats[i] - mats[j]) < EPS_MAT:
                raise ScenarioError(f"duplicate projectors for {labels[j]!r} and {labels[i]!r}")
    graph = AtomGraph.build(labels, _orthogonality(mats))
    s = Scenario(graph, Realization(dims.pop(), tuple(projectors)), name=name)
    return replace(s, validity=validate(s))


def from_vectors(kets: Sequence, labels: Sequence[str] | None = None, name: str = "") -> Scenario:
    kets = [k if isinstance(k, Ket) else Ket(k) for k in kets]
    if labels is None:
        labels = [f"v{i + 1}" for i in range(len(kets))]
    if len(labels) != len(kets):
        raise ScenarioError(f"{len(labels)} labels for {len(kets)} vectors")
    dims = {k.dim for k in kets}
    if len(dims) != 1:
        raise ScenarioError(f"ket dimensions differ: {sorted(dims)}")
    units = [k.normalized() for k in kets]
    for i in range(len(units)):
        for j in range(i):
            if abs(1 - abs(np.vdot(units[j], units[i]))) < EPS_MAT:
                raise ScenarioError(f"vectors {labels[j]!r} and {labels[i]!r} are parallel")
    return from_projectors([projector_from_ket(k) for k in kets], labels, name)


def from_graph(labels: Sequence[str], edges: Iterable[tuple[int, int]], name: str = "") -> Scenario:
    n = len(labels)
    adj = np.zeros((n, n), dtype=bool)
    for e in edges:
        i, j = (int(x) for x in e)
        if i == j:
            raise ScenarioError(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise ScenarioError(f"edge ({i}, {j}) out of range for {n} vertices")
        adj[i, j] = adj[j, i] = True
    return Scenario(AtomGraph.build(labels, adj), name=name)


# ---------------------------------------------------------------------------
# closure


def _canon_key(m: np.ndarray) -> tuple:
    r = np.round(m.real, 6) + 0.0
    i = np.round(m.imag, 6) + 0.0
    return (int(round(float(np.trace(m).real))), tuple(r.ravel().tolist()), tuple(i.ravel().tolist()))


class _ElementSet:
    """Projectors deduplicated by Frobenius distance via two offset hash grids."""

    _CELL = 1e-6

    def __init__(self, dim: int):
        self.dim = dim
        self.mats: list[np.ndarray] = []
        self._grids: tuple[dict, dict] = ({}, {})

    def _keys(self, m: np.ndarray):
        flat = np.concatenate([m.real.ravel(), m.imag.ravel()]) / self._CELL
        return tuple(np.floor(flat).astype(np.int64).tolist()), tuple(np.floor(flat + 0.5).astype(np.int64).tolist())

    def find(self, m: np.ndarray) -> int | None:
        for grid, key in zip(self._grids, self._keys(m)):
            k = grid.get(key)
            if k is not None and fro(self.mats[k] - m) < EPS_MAT:
                return k
        return None

    def add(self, m: np.ndarray) -> bool:
        if self.find(m) is not None:
            return False
        idx = len(self.mats)
        self.mats.append(m)
        for grid, key in zip(self._grids, self._keys(m)):
            grid.setdefault(key, idx)
        return True

    def __len__(self) -> int:
        return len(self.mats)


def closure(projectors: Sequence[Projector], limits: ClosureLimits = ClosureLimits()) -> list[np.ndarray]:
    """Close a projector set under complement and commuting meet (0 and I included)."""
    if not projectors:
        raise ScenarioError("closure of an empty set")
    dim = projectors[0].dim
    if any(p.dim != dim for p in projectors):
        raise ScenarioError("projector dimensions differ")
    eye = np.eye(dim, dtype=complex)
    els = _ElementSet(dim)

    def add(m: np.ndarray) -> None:
        if els.add(m):
            els.add(clean_projector(eye - m, steps=1))

    add(np.zeros((dim, dim), dtype=complex))
    for p in projectors:
        add(np.array(p.matrix))

    done = 0
    rounds = 0
    while True:
        n = len(els)
        if n == done:
            break
        rounds += 1
        if rounds > limits.max_rounds:
            raise ClosureLimitError(n, rounds - 1, limits)
        stack = np.array(els.mats)
        for i in range(n):
            lo = max(i + 1, done)
            if lo >= n:
                continue
            a = stack[i]
            block = stack[lo:n]
            ab = a @ block
            ba = block @ a
            comm = np.linalg.norm((ab - ba).reshape(len(block), -1), axis=1) < EPS_MAT
            for j in np.flatnonzero(comm):
                add(clean_projector((ab[j] + ba[j]) / 2))
                if len(els) > limits.max_elements:
                    raise ClosureLimitError(len(els), rounds, limits)
        done = n
    return els.mats


def _atoms_of(mats: list[np.ndarray]) -> list[np.ndarray]:
    nz = [m for m in mats if np.trace(m).real > 0.5]
    if not nz:
        return []
    stack = np.array(nz)
    ranks = np.rint(np.trace(stack, axis1=1, axis2=2).real).astype(int)
    atoms = []
    for k, p in enumerate(stack):
        smaller = np.flatnonzero(ranks < ranks[k])
        if smaller.size:
            q = stack[smaller]
            below = np.linalg.norm((p @ q - q).reshape(len(q), -1), axis=1) < EPS_MAT
            if below.any():
                continue
        atoms.append(p)
    return atoms


def _fresh_labels(count: int, taken: set[str], prefix: str = "g") -> list[str]:
    out = []
    k = 1
    while len(out) < count:
        lab = f"{prefix}{k}"
        if lab not in taken:
            out.append(lab)
        k += 1
    return out


def saturate(
    projectors: Sequence[Projector],
    labels: Sequence[str] | None = None,
    limits: ClosureLimits = ClosureLimits(),
    name: str = "",
) -> Scenario:
    """Scenario over the atoms of the projector closure.

    Atoms are sorted by (rank, rounded matrix entries). Atoms equal to an input
    projector keep its label; generated atoms are labelled ``g1, g2, ...``.
    """
    projectors = [p if isinstance(p, Projector) else Projector(p) for p in projectors]
    if any(p.rank == 0 for p in projectors):
        raise ScenarioError("zero projector in saturate input")
    if labels is None:
        labels = [f"p{i + 1}" for i in range(len(projectors))]
    if len(labels) != len(projectors):
        raise ScenarioError(f"{len(labels)} labels for {len(projectors)} projectors")
    atoms = sorted(_atoms_of(closure(projectors, limits)), key=_canon_key)
    names: list[str | None] = []
    for a in atoms:
        hit = next((lab for lab, p in zip(labels, projectors) if fro(p.matrix - a) < EPS_MAT), None)
        names.append(hit)
    fresh = iter(_fresh_labels(names.count(None), set(labels)))
    final = [x if x is not None else next(fresh) for x in names]
    return from_projectors([Projector(a, check=False) for a in atoms], final, name)


def complete(s: Scenario, limits: ClosureLimits = ClosureLimits()) -> Scenario:
    """Adjoin ``I - sum(K)`` for every incomplete maximal clique ``K`` until Valid.

    Every adjoined element lies in the algebra generated by the scenario's
    projectors (it is the complement of a join of pairwise orthogonal atoms).
    """
    if s.realization is None:
        raise ScenarioError("completion needs a projector realization")
    rounds = 0
    while not s.is_valid:
        rounds += 1
        if rounds > limits.max_rounds:
            raise ClosureLimitError(s.n, rounds - 1, limits)
        eye = np.eye(s.realization.dim)
        projs = list(s.realization.projectors)
        labels = list(s.labels)
        seen = _ElementSet(s.realization.dim)
        for p in projs:
            seen.add(np.array(p.matrix))
        for k in s.validity.deficient:
            clique = s.cliques[k]
            m = clean_projector(eye - sum(projs[v].matrix for v in clique))
            if seen.add(m):
                projs.append(Projector(m, check=False))
                labels.append("~{" + ",".join(s.labels[v] for v in clique) + "}")
        if len(projs) > limits.max_elements:
            raise ClosureLimitError(len(projs), rounds, limits)
        s = replace(from_projectors(projs, labels, s.name), layout=s.layout)
    return s


# ---------------------------------------------------------------------------
# isomorphism


def _refine(adjs: Sequence[np.ndarray]) -> list[list[int]]:
    """Joint colour refinement over several graphs so colours are comparable."""
    colors = [[int(a[v].sum()) for v in range(a.shape[0])] for a in adjs]
    nbrs = [[np.flatnonzero(a[v]).tolist() for v in range(a.shape[0])] for a in adjs]
    while True:
        sigs = [
            [(c[v], tuple(sorted(c[u] for u in nb[v]))) for v in range(len(c))]
            for c, nb in zip(colors, nbrs)
        ]
        palette = {sig: k for k, sig in enumerate(sorted({x for s in sigs for x in s}))}
        new = [[palette[x] for x in s] for s in sigs]
        if all(len(set(n)) == len(set(c)) for n, c in zip(new, colors)):
            return new
        colors = new


def find_isomorphism(g1: AtomGraph, g2: AtomGraph) -> list[int] | None:
    """A vertex map ``g1 -> g2`` preserving adjacency, or None."""
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return None
    a1, a2 = g1.adjacency, g2.adjacency
    if sorted(a1.sum(axis=1).tolist()) != sorted(a2.sum(axis=1).tolist()):
        return None
    c1, c2 = _refine([a1, a2])
    if sorted(c1) != sorted(c2):
        return None
    n = g1.n
    by_color: dict[int, list[int]] = {}
    for w in range(n):
        by_color.setdefault(c2[w], []).append(w)

    # visit small colour classes first, then stay adjacent to what is already mapped
    order: list[int] = []
    placed = [False] * n
    size = {c: len(v) for c, v in by_color.items()}
    while len(order) < n:
        frontier = [v for v in range(n) if not placed[v] and any(placed[u] for u in np.flatnonzero(a1[v]))]
        pool = frontier or [v for v in range(n) if not placed[v]]
        v = min(pool, key=lambda x: (size[c1[x]], -int(a1[x].sum()), x))
        order.append(v)
        placed[v] = True

    mapping = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        v = order[k]
        cands = by_color[c1[v]]
        if v in cands:
            cands = [v] + [w for w in cands if w != v]
        for w in cands:
            if used[w]:
                continue
            if all(a1[v, u] == a2[w, mapping[u]] for u in order[:k]):
                mapping[v] = w
                used[w] = True
                if extend(k + 1):
                    return True
                used[w] = False
                mapping[v] = -1
        return False

    return mapping if extend(0) else None


def is_isomorphic(g1: AtomGraph | Scenario, g2: AtomGraph | Scenario) -> bool:
    g1 = g1.graph if isinstance(g1, Scenario) else g1
    g2 = g2.graph if isinstance(g2, Scenario) else g2
    return find_isomorphism(g1, g2) is not None


__all__ = [
    "AtomGraph",
    "ClosureLimitError",
    "ClosureLimits",
    "LinalgError",
    "Realization",
    "Scenario",
    "ScenarioError",
    "Validity",
    "ValidityReport",
    "as_matrix",
    "closure",
    "complete",
    "find_isomorphism",
    "from_graph",
    "from_projectors",
    "from_vectors",
    "is_isomorphic",
    "maximal_cliques",
    "saturate",
    "validate",
]
