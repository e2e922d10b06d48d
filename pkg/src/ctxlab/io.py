"""JSON formats for scenarios, states and inequalities."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .classify import InequalitySpec
from .linalg import DensityMatrix, Ket, LinalgError, Projector, as_matrix, projector_from_ket
from .scenario import Scenario, ScenarioError, from_graph, from_projectors
from .states import GraphState, induce, validate_state

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A JSON document that does not follow the expected layout."""


def _complex_nested(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in m]
    return [_complex_nested(row) for row in m]


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _check_version(data: dict, what: str) -> None:
    if not isinstance(data, dict):
        raise FormatError(f"{what} file must hold a JSON object")
    v = data.get("format_version", FORMAT_VERSION)
    if v != FORMAT_VERSION:
        raise FormatError(f"unsupported {what} format_version {v!r} (expected {FORMAT_VERSION})")


def scenario_to_json(s: Scenario) -> dict:
    out: dict[str, Any] = {"format_version": FORMAT_VERSION, "name": s.name}
    atoms = []
    for v, lab in enumerate(s.labels):
        atom: dict[str, Any] = {"label": lab}
        if s.realization is not None:
            atom["projector"] = _complex_nested(s.realization.projectors[v].matrix)
        atoms.append(atom)
    if s.realization is not None:
        out["dimension"] = s.realization.dim
    out["atoms"] = atoms
    out["edges"] = [[s.labels[i], s.labels[j]] for i, j in s.graph.edges()]
    if s.layout is not None:
        out["layout"] = [{"context": r, "outcomes": [[c, s.labels[v]] for c, v in cols]} for r, cols in s.layout]
    return out


def _edge_index(s_labels: list[str], x) -> int:
    if isinstance(x, bool):
        raise FormatError(f"bad edge endpoint {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return s_labels.index(x)
        except ValueError:
            raise FormatError(f"edge refers to unknown atom {x!r}") from None
    raise FormatError(f"bad edge endpoint {x!r}")


def scenario_from_json(data: dict, name: str = "") -> Scenario:
    _check_version(data, "scenario")
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise FormatError("scenario needs a nonempty 'atoms' list")
    labels = []
    projs: list[Projector] = []
    for k, a in enumerate(atoms):
        if not isinstance(a, dict) or "label" not in a:
            raise FormatError(f"atom {k} needs a 'label'")
        labels.append(str(a["label"]))
        try:
            if "projector" in a:
                projs.append(Projector(as_matrix(a["projector"])))
            elif "ket" in a:
                projs.append(projector_from_ket(Ket(a["ket"])))
        except (LinalgError, ValueError, TypeError) as exc:
            raise FormatError(f"atom {labels[-1]!r}: {exc}") from None
    name = str(data.get("name") or name)
    edges = data.get("edges")
    if edges is not None:
        try:
            edges = [(_edge_index(labels, e[0]), _edge_index(labels, e[1])) for e in edges]
        except (TypeError, IndexError, KeyError):
            raise FormatError("edges must be pairs of atom labels or indices") from None
    if projs:
        if len(projs) != len(labels):
            raise FormatError("either every atom or no atom must carry a projector or ket")
        dim = data.get("dimension")
        if dim is not None and any(p.dim != dim for p in projs):
            raise FormatError(f"projector dimensions do not match declared dimension {dim}")
        s = from_projectors(projs, labels, name)
        if edges is not None:
            given = {tuple(sorted(e)) for e in edges}
            if given != set(s.graph.edges()):
                raise FormatError("declared edges disagree with projector orthogonality")
    else:
        if edges is None:
            raise FormatError("abstract scenarios (no projectors) need an 'edges' list")
        try:
            s = from_graph(labels, edges, name)
        except ScenarioError as exc:
            raise FormatError(str(exc)) from None
    layout = data.get("layout")
    if layout is not None:
        try:
            rows = [(r["context"], [(c, labels.index(lab)) for c, lab in r["outcomes"]]) for r in layout]
        except (KeyError, TypeError, ValueError):
            raise FormatError("malformed layout") from None
        s = s.with_layout(rows)
    return s


def state_to_json(p: GraphState, scenario_ref: str | None = None) -> dict:
    out: dict[str, Any] = {"format_version": FORMAT_VERSION}
    if scenario_ref:
        out["scenario"] = scenario_ref
    out["probs"] = p.as_dict()
    return out


def density_to_json(rho: DensityMatrix, scenario_ref: str | None = None) -> dict:
    out: dict[str, Any] = {"format_version": FORMAT_VERSION}
    if scenario_ref:
        out["scenario"] = scenario_ref
    out["density"] = _complex_nested(rho.matrix)
    return out


def state_from_json(data: dict, s: Scenario) -> tuple[GraphState, DensityMatrix | None]:
    _check_version(data, "state")
    if "probs" in data:
        probs = data["probs"]
        if not isinstance(probs, dict):
            raise FormatError("'probs' must map atom labels to numbers")
        return validate_state(s, probs), None
    if "density" in data:
        try:
            rho = DensityMatrix(as_matrix(data["density"]))
        except (LinalgError, ValueError, TypeError) as exc:
            raise FormatError(f"density: {exc}") from None
        return induce(s, rho), rho
    raise FormatError("state file needs 'probs' or 'density'")


def inequality_from_json(data: dict, name: str = "") -> InequalitySpec:
    _check_version(data, "inequality")
    w = data.get("weights")
    if not isinstance(w, dict) or not w:
        raise FormatError("inequality needs a nonempty 'weights' object")
    try:
        return InequalitySpec(w, str(data.get("name") or name))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"inequality: {exc}") from None


def inequality_to_json(ineq: InequalitySpec) -> dict:
    return {"format_version": FORMAT_VERSION, "name": ineq.name, "weights": dict(ineq.weights)}
