from __future__ import annotations

import json

import numpy as np
import pytest

from ctxlab.catalog import builtin
from ctxlab.classify import InequalitySpec
from ctxlab.io import (
    FormatError,
    density_to_json,
    inequality_from_json,
    inequality_to_json,
    read_json,
    scenario_from_json,
    scenario_to_json,
    state_from_json,
    state_to_json,
)
from ctxlab.linalg import EPS_MAT, fro
from ctxlab.scenario import find_isomorphism, is_isomorphic

NAMES = ["chsh", "ghz322", "kcbs", "ceg18", "ceg17", "yu_oh", "shared_event_d3", "triangle", "hardy", "cycle5"]


@pytest.mark.parametrize("name", NAMES)
def test_scenario_round_trip(name, tmp_path):
    s = builtin(name).scenario
    path = tmp_path / "s.json"
    path.write_text(json.dumps(scenario_to_json(s)))
    back = scenario_from_json(read_json(path))
    assert back.labels == s.labels
    assert is_isomorphic(back, s)
    assert back.layout == s.layout
    if s.realization is not None:
        m = find_isomorphism(s.graph, back.graph)
        assert m is not None
        for p, q in zip(s.realization.projectors, back.realization.projectors):
            assert fro(p.matrix - q.matrix) < EPS_MAT


def test_kets_and_abstract_edges():
    s = scenario_from_json({"atoms": [{"label": "a", "ket": [1, 0]}, {"label": "b", "ket": [[0, 0], [1, 0]]}]})
    assert s.n == 2 and s.is_valid and s.cliques == ((0, 1),)
    g = scenario_from_json({"atoms": [{"label": x} for x in "abc"], "edges": [["a", "b"], [1, 2]]})
    assert g.realization is None and len(g.cliques) == 2


@pytest.mark.parametrize(
    "doc, match",
    [
        ({"format_version": 2, "atoms": [{"label": "a", "ket": [1]}]}, "format_version"),
        ({"atoms": []}, "nonempty"),
        ({"atoms": [{"ket": [1, 0]}]}, "label"),
        ({"atoms": [{"label": "a"}]}, "edges"),
        ({"atoms": [{"label": "a", "projector": [[1, 1], [0, 0]]}]}, "Hermitian"),
        ({"atoms": [{"label": "a"}], "edges": [["a", "z"]]}, "unknown atom"),
        ({"atoms": [{"label": "a", "ket": [1, 0]}, {"label": "b", "ket": [0, 1]}], "edges": []}, "disagree"),
        ({"dimension": 3, "atoms": [{"label": "a", "ket": [1, 0]}]}, "dimension"),
    ],
)
def test_scenario_format_errors(doc, match):
    with pytest.raises(FormatError, match=match):
        scenario_from_json(doc)


def test_state_round_trip():
    e = builtin("chsh")
    p = e.states["singlet"]
    back, rho = state_from_json(json.loads(json.dumps(state_to_json(p, "chsh"))), e.scenario)
    assert rho is None and np.allclose(back.probs, p.probs)
    back, rho = state_from_json(density_to_json(e.densities["singlet"]), e.scenario)
    assert rho is not None and np.allclose(back.probs, p.probs)
    with pytest.raises(FormatError):
        state_from_json({"nothing": 1}, e.scenario)


def test_inequality_round_trip():
    ineq = InequalitySpec({"P0": 1.0, "P1": -0.5}, "mine")
    back = inequality_from_json(inequality_to_json(ineq))
    assert back.name == "mine" and dict(back.weights) == dict(ineq.weights)
    with pytest.raises(FormatError):
        inequality_from_json({"weights": {}})


def test_read_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FormatError, match="not valid JSON"):
        read_json(bad)
    with pytest.raises(FormatError, match="cannot read"):
        read_json(tmp_path / "missing.json")
