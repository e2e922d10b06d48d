"""Command-line front end.

Exit codes: 0 success, 1 analysis refused (truncated enumeration, closure
limits, failed self-check), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .assign import DEFAULT_LIMIT, enumerate_01, is_ks_contextual, ks_assignment_search, complete_cliques
from .catalog import BUILTIN_NAMES, CatalogEntry, builtin
from .classify import (
    AnalysisRefused,
    InequalitySpec,
    algebraic_bound,
    classify,
    eval_inequality,
    is_fully_contextual_witness,
    nc_bound,
    noncontextual_fraction,
)
from .io import FORMAT_VERSION, FormatError, inequality_from_json, read_json, scenario_from_json, scenario_to_json, state_from_json
from .linalg import LinalgError
from .lp import EPS_LP, LPError, LPNumericalError
from .scenario import ClosureLimitError, ClosureLimits, Scenario, ScenarioError, saturate
from .states import GraphState, StateError

DESCRIPTIONS = {
    "chsh": "two qubits, Z/X against S/T (16 atoms)",
    "hardy": "two-qubit Hardy model on the CHSH atom graph",
    "ghz322": "three qubits measuring X or Y (64 product atoms, completed)",
    "kcbs": "five cyclically orthogonal qutrit projectors, saturated (10 atoms)",
    "ceg18": "18-vector Kochen-Specker set in dimension 4 (saturated)",
    "ceg17": "the same set without (1,0,0,0) (saturated)",
    "yu_oh": "13-vector state-independent set in dimension 3 (saturated)",
    "shared_event_d3": "two qutrit bases sharing one vector",
    "triangle": "standard basis of a qutrit",
    "cycle<n>": "abstract n-cycle atom graph, e.g. cycle5",
}


class InputError(ValueError):
    """Bad command-line input: unknown names, unreadable files, mismatched data."""


_INPUT_ERRORS = (InputError, FormatError, ScenarioError, StateError, LinalgError, LPError, KeyError, OSError)
_REFUSALS = (AnalysisRefused, ClosureLimitError, LPNumericalError)


# ---------------------------------------------------------------------------
# formatting


def num(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{float(x):.9g}"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.9g}")
    return obj


class Styler:
    def __init__(self, stream):
        self.on = os.environ.get("CTXLAB_COLOR", "1") != "0" and hasattr(stream, "isatty") and stream.isatty()

    def __call__(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.on else text

    def yes_no(self, flag: bool) -> str:
        return self("yes", "1;32") if flag else self("no", "1;31")


# ---------------------------------------------------------------------------
# input resolution


@dataclass
class Loaded:
    scenario: Scenario
    entry: CatalogEntry | None
    ref: str


def load_scenario(ref: str | None) -> Loaded:
    if not ref:
        raise InputError("no scenario given; pass a builtin name or a scenario JSON file")
    path = Path(ref)
    if path.suffix == ".json" or path.is_file():
        if not path.is_file():
            raise InputError(f"scenario file {ref} does not exist")
        return Loaded(scenario_from_json(read_json(path), name=path.stem), None, ref)
    try:
        entry = builtin(ref)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    return Loaded(entry.scenario, entry, entry.name)


def load_state(ref: str | None, loaded: Loaded) -> tuple[str, GraphState]:
    if not ref:
        raise InputError("this command needs --state")
    if loaded.entry is not None and ref in loaded.entry.states:
        return ref, loaded.entry.states[ref]
    path = Path(ref)
    if path.is_file():
        p, _ = state_from_json(read_json(path), loaded.scenario)
        return path.stem, p
    known = ", ".join(loaded.entry.states) if loaded.entry else "none (file scenario)"
    raise InputError(f"unknown state {ref!r}; builtin states: {known}; or give a state JSON file")


def load_inequality(ref: str | None, loaded: Loaded) -> InequalitySpec:
    if not ref:
        raise InputError("this command needs --ineq")
    if loaded.entry is not None and ref in loaded.entry.inequalities:
        return loaded.entry.inequalities[ref]
    path = Path(ref)
    if path.is_file():
        ineq = inequality_from_json(read_json(path), name=path.stem)
        ineq.vector(loaded.scenario)  # validates labels
        return ineq
    known = ", ".join(loaded.entry.inequalities) if loaded.entry else "none (file scenario)"
    raise InputError(f"unknown inequality {ref!r}; builtin inequalities: {known}; or give an inequality JSON file")


def _scenario_ref(args) -> str | None:
    ref = getattr(args, "scenario_pos", None) or getattr(args, "scenario", None)
    if ref is None and getattr(args, "state", None) and Path(args.state).is_file():
        data = read_json(args.state)
        if isinstance(data, dict) and isinstance(data.get("scenario"), str):
            ref = data["scenario"]
    return ref


def _expected(loaded: Loaded, keys: Sequence[str]) -> dict:
    if loaded.entry is None:
        return {}
    out = {}
    for k in keys:
        e = loaded.entry.expected.get(k)
        if e is not None:
            out[k] = {"value": e.value, "tolerance": e.tolerance, "source": e.source}
    return out


def _labels(s: Scenario, vs) -> list[str]:
    return [s.labels[v] for v in sorted(vs)]


# ---------------------------------------------------------------------------
# commands: each returns (report, text lines, exit code)

Result = tuple[dict, list[str], int]


def cmd_list(args, st: Styler) -> Result:
    rows = [{"name": n, "description": DESCRIPTIONS.get(n, "")} for n in BUILTIN_NAMES]
    width = max(len(r["name"]) for r in rows)
    return {"builtins": rows}, [f"{r['name']:<{width}}  {r['description']}" for r in rows], 0


def cmd_show(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    s = ld.scenario
    rep: dict[str, Any] = {
        "scenario": ld.ref,
        "atoms": s.n,
        "edges": s.graph.num_edges,
        "maximal_cliques": [_labels(s, c) for c in s.cliques],
        "dimension": s.dim,
        "validity": s.validity.status.value,
    }
    if s.validity.residuals:
        rep["max_clique_residual"] = max(s.validity.residuals)
    if ld.entry is not None:
        rep["states"] = list(ld.entry.states)
        rep["inequalities"] = list(ld.entry.inequalities)
        rep["expected"] = _expected(ld, list(ld.entry.expected))
        rep["notes"] = ld.entry.notes
    lines = [
        f"scenario: {ld.ref}",
        f"atoms: {s.n}   edges: {s.graph.num_edges}   maximal cliques: {len(s.cliques)}   "
        f"dimension: {s.dim if s.dim is not None else 'abstract'}   validity: {s.validity.status.value}",
        "atoms: " + " ".join(s.labels),
    ]
    sizes: dict[int, int] = {}
    for c in s.cliques:
        sizes[len(c)] = sizes.get(len(c), 0) + 1
    lines.append("clique sizes: " + ", ".join(f"{k} x{v}" for k, v in sorted(sizes.items())))
    if ld.entry is not None:
        lines.append("states: " + (", ".join(ld.entry.states) or "-"))
        lines.append("inequalities: " + (", ".join(ld.entry.inequalities) or "-"))
        for k, v in rep["expected"].items():
            lines.append(f"expected {k}: {v['value']} ({v['source']})")
    return rep, lines, 0


def cmd_saturate(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    src = ld.entry.vector_set if ld.entry is not None and ld.entry.vector_set is not None else ld.scenario
    if src.realization is None:
        raise InputError("saturation needs projectors; the scenario is abstract")
    out = saturate(src.realization.projectors, src.labels, ClosureLimits(), name=ld.scenario.name)
    doc = scenario_to_json(out)
    if args.output:
        Path(args.output).write_text(json.dumps(_jsonable_exact(doc), indent=1) + "\n", encoding="utf-8")
    rep = {
        "scenario": ld.ref,
        "input_projectors": src.n,
        "atoms": out.n,
        "maximal_cliques": len(out.cliques),
        "validity": out.validity.status.value,
        "labels": list(out.labels),
        "ranks": [p.rank for p in out.realization.projectors],
    }
    lines = [
        f"input projectors: {src.n}",
        f"atoms: {out.n}   maximal cliques: {len(out.cliques)}   validity: {out.validity.status.value}",
        "atoms: " + " ".join(f"{lab}[{p.rank}]" for lab, p in zip(out.labels, out.realization.projectors)),
    ]
    if args.output:
        lines.append(f"written to {args.output}")
    return rep, lines, 0


def _jsonable_exact(obj: Any) -> Any:
    # projector entries are written at full precision so files round-trip
    if isinstance(obj, dict):
        return {k: _jsonable_exact(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable_exact(v) for v in obj]
    return obj


def cmd_ks(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    cert = is_ks_contextual(ld.scenario)
    e = enumerate_01(ld.scenario, args.limit)
    count = len(e)
    rep = {
        "scenario": ld.ref,
        "ks_contextual": cert.contextual,
        "exhaustive": True,
        "assignments": count,
        "truncated": e.truncated,
        "nodes_explored": cert.nodes_explored,
        "expected": _expected(ld, ["zero_one_states"]),
    }
    if cert.witness is not None:
        rep["witness"] = cert.witness.labels(ld.scenario)
    more = f"at least {count} assignments, enumeration truncated" if e.truncated else f"{count} assignments"
    lines = [f"KS-contextual: {st.yes_no(cert.contextual)} (exhaustive, {more})"]
    if cert.witness is not None:
        lines.append("witness 0-1 state: " + " ".join(rep["witness"]))
    return rep, lines, 0


def cmd_ks_assignment(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    s = ld.entry.vector_set if ld.entry is not None and ld.entry.vector_set is not None else ld.scenario
    if s.realization is None:
        raise InputError("KS-assignment search needs projectors; the scenario is abstract")
    found = ks_assignment_search(s)
    bases = complete_cliques(s)
    rep = {
        "scenario": ld.ref,
        "vectors": s.n,
        "full_bases": len(bases),
        "found": found is not None,
        "ones": _labels(s, found.ones) if found else None,
        "ks_set": found is None,
    }
    lines = [f"vectors: {s.n}   full bases: {len(bases)}"]
    if found is None:
        lines.append(f"KS assignment: {st('none', '1;31')} (the vector set is a KS set)")
    else:
        lines.append(f"KS assignment: {st('found', '1;32')}; value 1 on " + " ".join(rep["ones"]))
    return rep, lines, 0


def cmd_enumerate(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    e = enumerate_01(ld.scenario, args.limit)
    states = [z.labels(ld.scenario) for z in e.states]
    rep = {
        "scenario": ld.ref,
        "count": len(e),
        "truncated": e.truncated,
        "limit": e.limit,
        "states": states,
        "expected": _expected(ld, ["zero_one_states"]),
    }
    lines = [f"0-1 states: {len(e)}" + (f" (truncated at limit {e.limit})" if e.truncated else "")]
    lines += [f"  {k + 1:>4}: " + " ".join(z) for k, z in enumerate(states)]
    return rep, lines, 1 if e.truncated else 0


def cmd_classify(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    name, p = load_state(args.state, ld)
    s = ld.scenario
    r = classify(s, p, limit=args.limit, eps=args.tolerance)
    rep = {
        "scenario": ld.ref,
        "state": name,
        "flags": r.flags(),
        "noncontextual_fraction": r.fraction.w_nc,
        "contextual_fraction": r.contextual_fraction,
        "logical_witness": s.labels[r.logical_witness] if r.logical_witness is not None else None,
        "strong_witness": r.strong_witness.labels(s) if r.strong_witness is not None else None,
        "margins": r.margins,
    }
    lines = [f"scenario: {ld.ref}   state: {name}"]
    for k, v in r.flags().items():
        lines.append(f"{k.replace('_', ' ')}: {st.yes_no(v)}")
    lines.append(f"contextual fraction: {num(r.contextual_fraction)}")
    if rep["logical_witness"]:
        lines.append(f"logical witness atom: {rep['logical_witness']}")
    if rep["strong_witness"]:
        lines.append("0-1 state inside the support: " + " ".join(rep["strong_witness"]))
    return rep, lines, 0


def cmd_fraction(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    name, p = load_state(args.state, ld)
    s = ld.scenario
    fr = noncontextual_fraction(s, p, limit=args.limit, eps=args.tolerance)
    decomp = [{"weight": w, "support": z.labels(s)} for z, w in fr.decomposition]
    dual = {lab: float(y) for lab, y in zip(s.labels, fr.dual) if y != 0}
    rep = {
        "scenario": ld.ref,
        "state": name,
        "noncontextual_fraction": fr.w_nc,
        "contextual_fraction": fr.contextual_fraction,
        "deterministic_states": fr.n_deterministic,
        "decomposition": decomp,
        "dual_certificate": dual,
    }
    lines = [
        f"noncontextual fraction: {num(fr.w_nc)}",
        f"contextual fraction: {num(fr.contextual_fraction)}",
        f"0-1 states: {fr.n_deterministic}",
    ]
    for d in decomp:
        lines.append(f"  {num(d['weight']):>12}  " + " ".join(d["support"]))
    if dual:
        lines.append("dual certificate (sum y_v q(v) >= 1 on noncontextual q): "
                     + " ".join(f"{k}={num(v)}" for k, v in dual.items()))
    return rep, lines, 0


def cmd_ineq(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    ineq = load_inequality(args.ineq, ld)
    s = ld.scenario
    nc = nc_bound(s, ineq, limit=args.limit)
    alg = algebraic_bound(s, ineq, args.tolerance)
    rep: dict[str, Any] = {
        "scenario": ld.ref,
        "inequality": ineq.name,
        "nc_bound": nc,
        "nc_bound_empty": math.isinf(nc),
        "algebraic_bound": alg,
    }
    keys = [f"nc_bound.{ineq.name}", f"algebraic_bound.{ineq.name}"]
    lines = []
    if args.state:
        name, p = load_state(args.state, ld)
        val = eval_inequality(s, ineq, p)
        full = is_fully_contextual_witness(s, p, ineq, args.tolerance, limit=args.limit)
        rep.update({"state": name, "value": val, "violates_nc_bound": val > nc + args.tolerance, "fully_contextual": full})
        keys.append(f"value.{ineq.name}.{name}")
        lines.append(f"S = {num(val)}")
    lines.append(f"NC bound = {num(nc)}" + (" (no 0-1 states)" if math.isinf(nc) else ""))
    lines.append(f"algebraic bound = {num(alg)}")
    if args.state:
        lines.append(f"violates NC bound: {st.yes_no(rep['violates_nc_bound'])}")
        lines.append(f"fully contextual witness: {st.yes_no(rep['fully_contextual'])}")
    rep["expected"] = _expected(ld, keys)
    return rep, lines, 0


def cmd_table(args, st: Styler) -> Result:
    ld = load_scenario(_scenario_ref(args))
    name, p = load_state(args.state, ld)
    s = ld.scenario
    if s.layout is not None:
        rows = [(ctx, [(c, p.probs[v]) for c, v in cols]) for ctx, cols in s.layout]
    else:
        rows = [(f"K{k + 1}", [(s.labels[v], p.probs[v]) for v in c]) for k, c in enumerate(s.cliques)]
    rep = {
        "scenario": ld.ref,
        "state": name,
        "rows": [{"context": ctx, "probabilities": {c: x for c, x in cols}} for ctx, cols in rows],
    }
    lines = [f"scenario: {ld.ref}   state: {name}"]
    same_cols = len({tuple(c for c, _ in cols) for _, cols in rows}) == 1
    rw = max(len(ctx) for ctx, _ in rows)
    if same_cols:
        header = [c for c, _ in rows[0][1]]
        cw = max(12, *(len(h) for h in header))
        lines.append(" " * rw + " | " + " ".join(f"{h:>{cw}}" for h in header))
        lines.append("-" * (rw + 3 + (cw + 1) * len(header)))
        for ctx, cols in rows:
            lines.append(f"{ctx:<{rw}} | " + " ".join(f"{num(x):>{cw}}" for _, x in cols))
    else:
        for ctx, cols in rows:
            lines.append(f"{ctx:<{rw}} | " + "  ".join(f"{c}={num(x)}" for c, x in cols))
    return rep, lines, 0


def cmd_selfcheck(args, st: Styler) -> Result:
    from .acceptance import run_all

    results = run_all()
    rep = {
        "passed": all(r.passed for r in results),
        "criteria": [
            {"criterion": r.number, "title": r.title, "passed": r.passed, "seconds": r.seconds, "checks": r.lines}
            for r in results
        ],
    }
    lines = []
    for r in results:
        tag = st("PASS", "1;32") if r.passed else st("FAIL", "1;31")
        lines.append(f"[{tag}] criterion {r.number}: {r.title} ({r.seconds:.2f} s)")
        lines.extend("    " + line for line in r.lines)
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} criteria passed")
    return rep, lines, 0 if rep["passed"] else 1


COMMANDS: dict[str, tuple[Callable, str]] = {
    "list": (cmd_list, "list builtin scenarios"),
    "show": (cmd_show, "describe a scenario"),
    "saturate": (cmd_saturate, "generate the atoms of the algebra spanned by a projector set"),
    "ks": (cmd_ks, "decide KS contextuality (no 0-1 state)"),
    "ks-assignment": (cmd_ks_assignment, "search a KS assignment on a vector set"),
    "enumerate": (cmd_enumerate, "list all 0-1 states"),
    "classify": (cmd_classify, "place a state in the contextuality hierarchy"),
    "fraction": (cmd_fraction, "noncontextual fraction with decomposition and dual certificate"),
    "ineq": (cmd_ineq, "evaluate an inequality and its bounds"),
    "table": (cmd_table, "probability table by measurement context"),
    "selfcheck": (cmd_selfcheck, "run the acceptance checks"),
}

_NEEDS_SCENARIO = {"show", "saturate", "ks", "ks-assignment", "enumerate", "classify", "fraction", "ineq", "table"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="0-1 state enumeration limit")
    common.add_argument("--tolerance", type=float, default=EPS_LP, help="LP and classification tolerance")
    parser = argparse.ArgumentParser(prog="ctxlab", description="Contextuality analysis of quantum scenarios.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name in _NEEDS_SCENARIO:
            p.add_argument("scenario_pos", nargs="?", metavar="scenario", help="builtin name or scenario JSON file")
            p.add_argument("--scenario", help="builtin name or scenario JSON file")
        if name in {"classify", "fraction", "ineq", "table"}:
            p.add_argument("--state", help="builtin state name or state JSON file")
        if name == "ineq":
            p.add_argument("--ineq", help="builtin inequality name or inequality JSON file")
        if name == "saturate":
            p.add_argument("--output", help="write the saturated scenario JSON here")
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.limit is not None and args.limit <= 0:
        print("ctxlab: error: --limit must be positive", file=err)
        return 2
    if not args.tolerance > 0:
        print("ctxlab: error: --tolerance must be positive", file=err)
        return 2
    st = Styler(out)
    fn = COMMANDS[args.command][0]
    try:
        rep, lines, code = fn(args, st)
    except _REFUSALS as exc:
        print(f"ctxlab: refused: {exc}", file=err)
        return 1
    except _INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ctxlab: error: {msg}", file=err)
        return 2
    if args.json:
        doc = {"format_version": FORMAT_VERSION, "command": args.command, **rep}
        out.write(json.dumps(_jsonable(doc), indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return code


def main() -> None:
    sys.exit(run())
