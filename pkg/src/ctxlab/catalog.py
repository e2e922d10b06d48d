"""Built-in scenarios, states and inequalities."""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .classify import InequalitySpec
from .linalg import (
    EPS_MAT,
    DensityMatrix,
    LinalgError,
    Projector,
    eigenprojector,
    maximally_mixed,
    pauli_matrix,
    pure,
)
from .scenario import Scenario, complete, from_graph, from_projectors, from_vectors, saturate
from .states import GraphState, induce, validate_state


@dataclass(frozen=True)
class Expected:
    value: Any
    tolerance: float
    source: str  # "literature" (value stated in the literature) or "computed" (independent computation)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    scenario: Scenario
    states: dict[str, GraphState] = field(default_factory=dict)
    densities: dict[str, DensityMatrix] = field(default_factory=dict)
    inequalities: dict[str, InequalitySpec] = field(default_factory=dict)
    expected: dict[str, Expected] = field(default_factory=dict)
    vector_set: Scenario | None = None
    notes: dict[str, str] = field(default_factory=dict)


def _outcome(sign: int) -> str:
    return "+" if sign > 0 else "-"


def bell_scenario(parts: Sequence[Sequence], names: Sequence[Sequence[str]] | None = None, name: str = "") -> Scenario:
    """Product atoms of +/-1 observables, one observable per part, completed to a Valid scenario.

    Atoms are labelled ``<outcomes>|<observables>`` (e.g. ``+-|ZS``) and ordered
    by observable choice, then outcome (``+`` before ``-``). The measurement
    contexts are stored as the scenario layout for tabular display.
    """
    if not parts or any(len(obs) == 0 for obs in parts):
        raise ValueError("every part needs at least one observable")
    if names is None:
        names = [[f"{chr(65 + k)}{j + 1}" for j in range(len(obs))] for k, obs in enumerate(parts)]
    if [len(o) for o in names] != [len(o) for o in parts]:
        raise ValueError("observable names do not match the parts")
    eig = []
    for obs in parts:
        row = []
        for m in obs:
            try:
                row.append({+1: eigenprojector(m, +1), -1: eigenprojector(m, -1)})
            except LinalgError as exc:
                raise LinalgError(f"Bell observable is not a +/-1 involution: {exc}") from None
        eig.append(row)
    sep = "" if all(len(x) == 1 for o in names for x in o) else ","
    projs: list[Projector] = []
    labels: list[str] = []
    layout = []
    for choice in itertools.product(*[range(len(o)) for o in parts]):
        ctx = sep.join(names[k][j] for k, j in enumerate(choice))
        cols = []
        for signs in itertools.product((1, -1), repeat=len(parts)):
            m = np.eye(1)
            for k, (j, sg) in enumerate(zip(choice, signs)):
                m = np.kron(m, eig[k][j][sg].matrix)
            if np.trace(m).real < 0.5:
                continue
            out = "".join(_outcome(sg) for sg in signs)
            cols.append((out, len(projs)))
            projs.append(Projector(m, check=False))
            labels.append(f"{out}|{ctx}")
        layout.append((ctx, tuple(cols)))
    s = from_projectors(projs, labels, name).with_layout(layout)
    return complete(s)


# ---------------------------------------------------------------------------
# vector sets

CEG_VECTORS = [
    (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 1, 0), (0, -1, 1, 0), (0, 1, 0, 0), (1, 0, 1, 0),
    (-1, 0, 1, 0), (1, -1, 1, -1), (-1, -1, 1, 1), (1, 0, 0, 1), (1, 1, 1, 1), (0, 1, 0, -1),
    (0, 0, 1, 1), (0, 0, 1, -1), (-1, 1, 0, 0), (-1, 1, 1, 1), (1, 1, 1, -1), (1, 1, -1, 1),
]  # fmt: skip

YU_OH_VECTORS = {
    "z1": (1, 0, 0), "z2": (0, 1, 0), "z3": (0, 0, 1),
    "y1-": (0, 1, -1), "y1+": (0, 1, 1), "y2-": (1, 0, -1), "y2+": (1, 0, 1),
    "y3-": (1, -1, 0), "y3+": (1, 1, 0),
    "h0": (1, 1, 1), "h1": (-1, 1, 1), "h2": (1, -1, 1), "h3": (1, 1, -1),
}  # fmt: skip

YU_OH_WITNESS = ("h0", "h1", "h2", "h3")


def _coord_label(v: Sequence[int]) -> str:
    return "(" + ",".join(str(int(x)) for x in v) + ")"


def _integer_direction(p: Projector) -> tuple[int, ...] | None:
    """Small-integer spanning vector of a real rank-1 projector, if it has one."""
    if p.rank != 1:
        return None
    w, vecs = np.linalg.eigh(p.matrix)
    v = vecs[:, -1]
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v) > 1e-6)]))
    if np.abs(v.imag).max() > 1e-9:
        return None
    v = v.real
    v = v / np.abs(v[np.abs(v) > 1e-6]).min()
    r = np.rint(v)
    if np.abs(v - r).max() > 1e-6 or np.abs(r).max() > 9:
        return None
    return tuple(int(x) for x in r)


def _relabel_by_coordinates(s: Scenario) -> Scenario:
    mapping = {}
    for lab, p in zip(s.labels, s.realization.projectors):
        if re.fullmatch(r"g\d+", lab):
            d = _integer_direction(p)
            if d is not None:
                mapping[lab] = _coord_label(d)
    return s.relabel(mapping)


def _maximally_mixed_entry(s: Scenario) -> tuple[dict, dict]:
    rho = maximally_mixed(s.realization.dim)
    return {"maximally_mixed": induce(s, rho)}, {"maximally_mixed": rho}


# ---------------------------------------------------------------------------
# entries


def _chsh_observables():
    Z, X = pauli_matrix("Z"), pauli_matrix("X")
    S = -(Z + X) / np.sqrt(2)
    T = (Z - X) / np.sqrt(2)
    return Z, X, S, T


CHSH_WEIGHTS = {
    "++|ZS": 1, "--|ZS": 1, "++|XT": 1, "--|XT": 1,
    "++|XS": 1, "--|XS": 1, "+-|ZT": 1, "-+|ZT": 1,
}  # fmt: skip


def _hardy_parts():
    """Real qubit bases in which (|00> + |01> + |10>)/sqrt3 has zeros at ++|ZT, ++|XS and --|XT."""

    def unit(v):
        v = np.asarray(v, dtype=float)
        return v / np.linalg.norm(v)

    def perp(v):
        return np.array([-v[1], v[0]])

    def observable(plus):
        minus = perp(plus)
        return np.outer(plus, plus) - np.outer(minus, minus)

    psi = unit([1, 1, 1, 0])
    Psi = psi.reshape(2, 2)
    z_plus = np.array([np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)])
    t_minus = unit(z_plus @ Psi)
    x_plus = unit(Psi @ t_minus)
    s_minus = unit(x_plus @ Psi)
    alice = [observable(z_plus), observable(x_plus)]
    bob = [observable(perp(s_minus)), observable(perp(t_minus))]
    return [alice, bob], psi


def _chsh() -> CatalogEntry:
    Z, X, S, T = _chsh_observables()
    s = bell_scenario([[Z, X], [S, T]], [["Z", "X"], ["S", "T"]], "chsh")
    singlet = pure(np.array([0, 1, -1, 0]) / np.sqrt(2))
    pr = {lab: (0.5 if lab in CHSH_WEIGHTS else 0.0) for lab in s.labels}
    hardy = _hardy().states["hardy"].as_dict()
    states = {
        "singlet": induce(s, singlet),
        "maximally_mixed": induce(s, maximally_mixed(4)),
        "pr_box": validate_state(s, pr),
        "hardy": validate_state(s, hardy),
    }
    r2 = np.sqrt(2)
    return CatalogEntry(
        "chsh",
        s,
        states,
        {"singlet": singlet, "maximally_mixed": maximally_mixed(4)},
        {"chsh": InequalitySpec(CHSH_WEIGHTS, "chsh")},
        {
            "atoms": Expected(16, 0, "literature"),
            "zero_one_states": Expected(16, 0, "computed"),
            "nc_bound.chsh": Expected(3.0, 0, "literature"),
            "value.chsh.singlet": Expected(2 + r2, 1e-9, "literature"),
            "algebraic_bound.chsh": Expected(4.0, 1e-7, "computed"),
            "value.chsh.pr_box": Expected(4.0, 1e-9, "computed"),
            "prob.++|ZS.singlet": Expected((1 + 1 / r2) / 4, 1e-9, "computed"),
        },
        notes={"hardy": "GraphState copied from the hardy entry (same atom graph and labels)"},
    )


def _hardy() -> CatalogEntry:
    parts, psi = _hardy_parts()
    s = bell_scenario(parts, [["Z", "X"], ["S", "T"]], "hardy")
    rho = pure(psi)
    return CatalogEntry(
        "hardy",
        s,
        {"hardy": induce(s, rho), "maximally_mixed": induce(s, maximally_mixed(4))},
        {"hardy": rho, "maximally_mixed": maximally_mixed(4)},
        {"chsh": InequalitySpec(CHSH_WEIGHTS, "chsh")},
        {"zero_vertices": Expected(("++|XS", "++|ZT", "--|XT"), 0, "computed")},
        notes={"construction": "state (|00>+|01>+|10>)/sqrt3; bases chosen to produce the three Hardy zeros"},
    )


GHZ_TABLE = {
    "XXX": [2, 0, 0, 2, 0, 2, 2, 0],
    "XXY": [1] * 8,
    "XYX": [1] * 8,
    "XYY": [0, 2, 2, 0, 2, 0, 0, 2],
    "YXX": [1] * 8,
    "YXY": [0, 2, 2, 0, 2, 0, 0, 2],
    "YYX": [0, 2, 2, 0, 2, 0, 0, 2],
    "YYY": [1] * 8,
}  # in units of 1/8, outcome columns +++, ++-, ..., ---


def _ghz() -> CatalogEntry:
    X, Y = pauli_matrix("X"), pauli_matrix("Y")
    s = bell_scenario([[X, Y]] * 3, [["X", "Y"]] * 3, "ghz322")
    ket = np.zeros(8)
    ket[0] = ket[7] = 1 / np.sqrt(2)
    rho = pure(ket)
    mermin = {}
    for ctx, want in (("XXX", 1), ("XYY", -1), ("YXY", -1), ("YYX", -1)):
        for signs in itertools.product((1, -1), repeat=3):
            if np.prod(signs) == want:
                mermin["".join(_outcome(x) for x in signs) + "|" + ctx] = 1.0
    return CatalogEntry(
        "ghz322",
        s,
        {"ghz": induce(s, rho), "maximally_mixed": induce(s, maximally_mixed(8))},
        {"ghz": rho, "maximally_mixed": maximally_mixed(8)},
        {"mermin": InequalitySpec(mermin, "mermin")},
        {
            "product_atoms": Expected(64, 0, "literature"),
            "zero_one_states": Expected(64, 0, "computed"),
            "table.ghz": Expected({k: [x / 8 for x in v] for k, v in GHZ_TABLE.items()}, 1e-9, "literature"),
            "nc_bound.mermin": Expected(3.0, 0, "computed"),
            "value.mermin.ghz": Expected(4.0, 1e-9, "computed"),
        },
        notes={"completion": "complements I - sum(K) adjoined for every Mermin-type incomplete clique"},
    )


def kcbs_vectors() -> list[np.ndarray]:
    c = np.cos(np.pi / 5)
    cos_t = np.sqrt(c / (1 + c))
    sin_t = np.sqrt(1 - cos_t**2)
    return [
        np.array([sin_t * np.cos(4 * np.pi * i / 5), sin_t * np.sin(4 * np.pi * i / 5), cos_t]) for i in range(5)
    ]


def _kcbs() -> CatalogEntry:
    vs = kcbs_vectors()
    for i in range(5):
        if abs(vs[i] @ vs[(i + 1) % 5]) >= EPS_MAT:
            raise AssertionError("KCBS vectors are not cyclically orthogonal")
    base = from_vectors(vs, [f"P{i}" for i in range(5)])
    s = saturate(base.realization.projectors, base.labels, name="kcbs")
    mapping = {}
    for v, lab in enumerate(s.labels):
        if lab.startswith("P"):
            continue
        for i in range(5):
            j = (i + 1) % 5
            if s.adjacency[v, s.index(f"P{i}")] and s.adjacency[v, s.index(f"P{j}")]:
                mapping[lab] = f"P{i}{j}"
    s = s.relabel(mapping)
    v = sum(vs)
    rho = pure(v)
    half = {lab: (0.5 if len(lab) == 2 else 0.0) for lab in s.labels}
    return CatalogEntry(
        "kcbs",
        s,
        {
            "kcbs": induce(s, rho),
            "maximally_mixed": induce(s, maximally_mixed(3)),
            "half_cycle": validate_state(s, half),
        },
        {"kcbs": rho, "maximally_mixed": maximally_mixed(3)},
        {"kcbs": InequalitySpec({f"P{i}": 1.0 for i in range(5)}, "kcbs")},
        {
            "atoms": Expected(10, 0, "literature"),
            "cliques": Expected(5, 0, "literature"),
            "nc_bound.kcbs": Expected(2.0, 0, "literature"),
            "value.kcbs.kcbs": Expected(np.sqrt(5), 1e-9, "literature"),
            "algebraic_bound.kcbs": Expected(2.5, 1e-7, "computed"),
        },
    )


def _ceg(drop_first_axis: bool) -> CatalogEntry:
    vecs = [v for v in CEG_VECTORS if not (drop_first_axis and v == (1, 0, 0, 0))]
    name = "ceg17" if drop_first_axis else "ceg18"
    raw = from_vectors(vecs, [_coord_label(v) for v in vecs], name=f"{name}-vectors")
    s = _relabel_by_coordinates(saturate(raw.realization.projectors, raw.labels, name=name))
    states, dens = _maximally_mixed_entry(s)
    expected = {"vector_set_ks": Expected(not drop_first_axis, 0, "literature")}
    if drop_first_axis:
        expected["saturated_atoms"] = Expected(18, 0, "literature")
    else:
        expected["zero_one_states"] = Expected(0, 0, "literature")
    return CatalogEntry(
        name,
        s,
        states,
        dens,
        {},
        expected,
        vector_set=raw,
        notes={
            "coordinates": "standard CEG-18 vectors with coordinates 1 and 3 exchanged",
            "scenario": "saturated system; the raw vector set is kept as vector_set",
        },
    )


def _yu_oh() -> CatalogEntry:
    labels = list(YU_OH_VECTORS)
    raw = from_vectors([YU_OH_VECTORS[k] for k in labels], labels, name="yu_oh-vectors")
    s = _relabel_by_coordinates(saturate(raw.realization.projectors, labels, name="yu_oh"))
    states, dens = _maximally_mixed_entry(s)
    return CatalogEntry(
        "yu_oh",
        s,
        states,
        dens,
        {"yu_oh": InequalitySpec({k: 1.0 for k in YU_OH_WITNESS}, "yu_oh")},
        {
            "nc_bound.yu_oh": Expected(1.0, 0, "literature"),
            "witness_value": Expected(4 / 3, 1e-9, "literature"),
            "ks_sisc": Expected((False, False), 0, "literature"),
        },
        vector_set=raw,
        notes={"coordinates": "standard 13 Yu-Oh vectors; witness atoms h0..h3"},
    )


def _shared_event() -> CatalogEntry:
    r = 1 / np.sqrt(2)
    vecs = {"0": (0, 0, 1), "1": (0, 1, 0), "2": (1, 0, 0), "x": (r, r, 0), "y": (r, -r, 0)}
    projs = from_vectors(list(vecs.values()), list(vecs)).realization.projectors
    s = saturate(projs, list(vecs), name="shared_event_d3")
    states, dens = _maximally_mixed_entry(s)
    return CatalogEntry(
        "shared_event_d3",
        s,
        states,
        dens,
        {},
        {"atoms": Expected(5, 0, "computed"), "shared_atoms": Expected(("0",), 0, "computed")},
        notes={"observables": "A diagonal in {0,1,2}, B diagonal in {0,x,y}; A=a0 and B=b0 are the atom '0'"},
    )


def _triangle() -> CatalogEntry:
    s = from_vectors(np.eye(3), ["e1", "e2", "e3"], name="triangle")
    states, dens = _maximally_mixed_entry(s)
    return CatalogEntry("triangle", s, states, dens, {}, {"cliques": Expected(1, 0, "computed")})


def _cycle(n: int) -> CatalogEntry:
    if n < 3:
        raise KeyError(f"cycle length must be at least 3, got {n}")
    labels = [f"c{i}" for i in range(n)]
    s = from_graph(labels, [(i, (i + 1) % n) for i in range(n)], name=f"cycle{n}")
    states = {}
    half = np.full(n, 0.5)
    if all(len(c) == 2 for c in s.cliques):
        states["half"] = validate_state(s, half)
    return CatalogEntry(
        f"cycle{n}", s, states, {}, {"sum": InequalitySpec({lab: 1.0 for lab in labels}, "sum")}, {}
    )


_BUILDERS = {
    "chsh": _chsh,
    "ghz322": _ghz,
    "kcbs": _kcbs,
    "ceg18": lambda: _ceg(False),
    "ceg17": lambda: _ceg(True),
    "yu_oh": _yu_oh,
    "shared_event_d3": _shared_event,
    "triangle": _triangle,
    "hardy": _hardy,
}

BUILTIN_NAMES = tuple(_BUILDERS) + ("cycle<n>",)


@functools.lru_cache(maxsize=None)
def builtin(name: str) -> CatalogEntry:
    """Catalog entry by name; ``cycle5``, ``cycle(5)`` and ``cycle_5`` all name the 5-cycle."""
    key = name.strip().lower()
    m = re.fullmatch(r"cycle[_(]?(\d+)\)?", key)
    if m:
        return _cycle(int(m.group(1)))
    try:
        return _BUILDERS[key]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; known: {', '.join(BUILTIN_NAMES)}") from None


def is_builtin(name: str) -> bool:
    try:
        builtin(name)
    except KeyError:
        return False
    return True


__all__ = [
    "BUILTIN_NAMES",
    "CEG_VECTORS",
    "CHSH_WEIGHTS",
    "CatalogEntry",
    "Expected",
    "GHZ_TABLE",
    "YU_OH_VECTORS",
    "YU_OH_WITNESS",
    "bell_scenario",
    "builtin",
    "is_builtin",
    "kcbs_vectors",
]
