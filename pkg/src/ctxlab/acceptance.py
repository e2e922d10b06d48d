"""End-to-end acceptance checks, shared by the test suite and ``ctxlab selfcheck``.

Every check returns a :class:`CriterionResult`; nothing here raises on a
failed expectation, so a single run reports all criteria.
"""

from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assign import enumerate_01, is_ks_contextual, ks_assignment_search
from .catalog import CEG_VECTORS, GHZ_TABLE, YU_OH_WITNESS, builtin
from .classify import (
    HierarchyError,
    algebraic_bound,
    classify,
    eval_inequality,
    is_fully_contextual_witness,
    is_strongly_contextual,
    ks_sisc_check,
    nc_bound,
    noncontextual_fraction,
)
from .linalg import fro
from .lp import EPS_LP, LinearProgram, LPStatus, solve
from .sampling import random_density_matrix, random_states
from .scenario import Scenario, find_isomorphism, from_graph, from_vectors, saturate
from .states import EPS_STATE, GraphState, StateError, event, event_prob, induce, validate_state


@dataclass
class CriterionResult:
    number: str
    title: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def check(self, ok: bool, message: str) -> bool:
        self.lines.append(("ok   " if ok else "FAIL ") + message)
        self.passed &= bool(ok)
        return bool(ok)

    def summary(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title} ({self.seconds:.2f} s)"


def _timed(number: str, title: str):
    def wrap(fn: Callable[[CriterionResult], None]) -> Callable[[], CriterionResult]:
        @functools.wraps(fn)
        def run() -> CriterionResult:
            r = CriterionResult(number, title)
            t = time.perf_counter()
            try:
                fn(r)
            except Exception as exc:  # report, do not abort the suite
                r.check(False, f"raised {type(exc).__name__}: {exc}")
            r.seconds = time.perf_counter() - t
            return r

        return run

    return wrap


# ---------------------------------------------------------------------------
# independent oracles


def brute_force_01(s: Scenario) -> list[frozenset[int]]:
    """All vertex subsets meeting every maximal clique exactly once (small graphs only)."""
    if s.n > 20:
        raise ValueError("brute force is limited to 20 vertices")
    masks = [sum(1 << v for v in c) for c in s.cliques]
    out = []
    for sub in range(1 << s.n):
        if all((sub & m) and not (sub & m) & ((sub & m) - 1) for m in masks):
            out.append(frozenset(v for v in range(s.n) if sub >> v & 1))
    return out


def caratheodory_member(deterministic: list[np.ndarray], p: np.ndarray, tol: float = 1e-9) -> bool:
    """Is ``p`` a convex combination of at most ``len(p) + 1`` of the given points?"""
    k = len(deterministic)
    if k == 0:
        return False
    pts = np.array(deterministic)
    for size in range(1, min(k, len(p) + 1) + 1):
        for sub in itertools.combinations(range(k), size):
            M = np.vstack([pts[list(sub)].T, np.ones(size)])
            rhs = np.append(p, 1.0)
            lam, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            if np.all(lam >= -tol) and np.linalg.norm(M @ lam - rhs) < tol:
                return True
    return False


def basis_enumeration_max(A: np.ndarray, b: np.ndarray, c: np.ndarray) -> float | None:
    """max c.x s.t. A x <= b, x >= 0 by trying every basis; None if infeasible (program assumed bounded)."""
    m, n = A.shape
    M = np.hstack([A, np.eye(m)])
    cost = np.concatenate([c, np.zeros(m)])
    best = None
    for cols in itertools.combinations(range(n + m), m):
        B = M[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if np.any(xb < -1e-9):
            continue
        val = float(cost[list(cols)] @ xb)
        best = val if best is None else max(best, val)
    return best


# ---------------------------------------------------------------------------
# criteria


@_timed("1", "CEG-18 has no 0-1 state and no KS assignment")
def criterion_1(r: CriterionResult) -> None:
    t = time.perf_counter()
    raw = from_vectors(CEG_VECTORS)
    cert = is_ks_contextual(raw)
    e = enumerate_01(raw)
    entry = builtin("ceg18")
    sat = is_ks_contextual(entry.scenario)
    ks = ks_assignment_search(raw)
    dt = time.perf_counter() - t
    r.check(cert.contextual and len(e) == 0 and not e.truncated, f"vector set: exhaustive search finds {len(e)} 0-1 states")
    r.check(sat.contextual, f"saturated system ({entry.scenario.n} atoms): 0-1 states exist = {not sat.contextual}")
    r.check(ks is None, "KS-assignment search returns none")
    r.check(dt < 5, f"runtime {dt:.2f} s < 5 s")


@_timed("2", "CEG-17 has a KS assignment and saturates to an 18-atom graph isomorphic to CEG-18")
def criterion_2(r: CriterionResult) -> None:
    t = time.perf_counter()
    entry = builtin("ceg17")
    raw17 = entry.vector_set
    ks = ks_assignment_search(raw17)
    r.check(ks is not None, f"KS assignment found on the 17 vectors: {sorted(raw17.labels[v] for v in ks.ones) if ks else None}")
    sat17 = saturate(raw17.realization.projectors, raw17.labels)
    raw18 = from_vectors(CEG_VECTORS)
    r.check(sat17.n == 18, f"saturated CEG-17 has {sat17.n} atoms (expected 18)")
    iso = find_isomorphism(sat17.graph, raw18.graph) is not None
    r.check(iso, f"saturated CEG-17 isomorphic to the CEG-18 atom graph: {iso}")
    sat18 = saturate(raw18.realization.projectors)
    r.lines.append(
        f"info saturated CEG-17 isomorphic to saturated CEG-18 ({sat18.n} atoms): "
        f"{find_isomorphism(sat17.graph, sat18.graph) is not None}"
    )
    dt = time.perf_counter() - t
    r.check(dt < 5, f"runtime {dt:.2f} s < 5 s")


@_timed("3", "KCBS atoms, bounds, violation and classification")
def criterion_3(r: CriterionResult) -> None:
    e = builtin("kcbs")
    s = e.scenario
    r.check(s.n == 10 and len(s.cliques) == 5 and all(len(c) == 3 for c in s.cliques),
            f"{s.n} atoms, {len(s.cliques)} maximal cliques of sizes {sorted(len(c) for c in s.cliques)}")
    ineq = e.inequalities["kcbs"]
    nc = nc_bound(s, ineq)
    r.check(nc == 2.0, f"NC bound {nc:.9g} == 2")
    val = eval_inequality(s, ineq, e.states["kcbs"])
    r.check(abs(val - np.sqrt(5)) < 1e-9, f"S(KCBS state) = {val:.12g}, sqrt5 = {np.sqrt(5):.12g}")
    alg = algebraic_bound(s, ineq)
    r.check(abs(alg - 2.5) < 1e-7, f"algebraic bound {alg:.12g} == 5/2")
    rep = classify(s, e.states["kcbs"])
    r.check(rep.contextual and not rep.logically_contextual,
            f"KCBS state contextual={rep.contextual}, logically contextual={rep.logically_contextual}")


@_timed("4", "CHSH atoms, 0-1 states, bounds and PR box")
def criterion_4(r: CriterionResult) -> None:
    e = builtin("chsh")
    s = e.scenario
    r.check(s.n == 16, f"{s.n} atoms")
    en = enumerate_01(s)
    oracle = brute_force_01(s)
    r.check(len(en) == 16 and {z.support for z in en} == set(oracle),
            f"enumerate_01 gives {len(en)} states; brute force over 2^16 subsets gives {len(oracle)}")
    ineq = e.inequalities["chsh"]
    nc = nc_bound(s, ineq)
    r.check(nc == 3.0, f"NC bound {nc:.9g} == 3")
    val = eval_inequality(s, ineq, e.states["singlet"])
    r.check(abs(val - (2 + np.sqrt(2))) < 1e-9, f"S(singlet) = {val:.12g}, 2+sqrt2 = {2 + np.sqrt(2):.12g}")
    fr = noncontextual_fraction(s, e.states["singlet"])
    rep = classify(s, e.states["singlet"])
    cf = fr.contextual_fraction
    r.check(rep.contextual and 0 < cf < 1, f"singlet contextual={rep.contextual}, CF = {cf:.9g}")
    pr = e.states["pr_box"]
    prr = classify(s, pr)
    r.check(prr.strongly_contextual, f"PR box strongly contextual={prr.strongly_contextual}")
    r.check(abs(prr.contextual_fraction - 1) < 1e-7, f"PR box CF = {prr.contextual_fraction:.12g}")
    alg = algebraic_bound(s, ineq)
    full = is_fully_contextual_witness(s, pr, ineq)
    r.check(full, f"PR box fully contextual: S = {eval_inequality(s, ineq, pr):.9g}, algebraic {alg:.9g}, NC {nc:.9g}")


@_timed("5", "GHZ table, strong contextuality, 0-1 states and Hardy")
def criterion_5(r: CriterionResult) -> None:
    e = builtin("ghz322")
    s = e.scenario
    p = e.states["ghz"]
    worst = 0.0
    for ctx, cols in s.layout:
        want = np.array(GHZ_TABLE[ctx]) / 8
        got = np.array([p.probs[v] for _, v in cols])
        worst = max(worst, float(np.abs(got - want).max()))
    r.check(len(s.layout) == 8 and worst < 1e-9, f"8x8 table matches the reference, max deviation {worst:.2e}")
    r.check(is_strongly_contextual(s, p), "GHZ state strongly contextual")
    n01 = len(enumerate_01(s))
    r.check(n01 == 64, f"enumerate_01 = {n01}")
    h = builtin("hardy")
    hr = classify(h.scenario, h.states["hardy"])
    r.check(hr.logically_contextual and not hr.strongly_contextual,
            f"Hardy logically={hr.logically_contextual}, strongly={hr.strongly_contextual}, "
            f"witness atom {h.scenario.labels[hr.logical_witness] if hr.logical_witness is not None else None}")


@_timed("6", "Yu-Oh validity, 0-1 states, witness and KS/SI comparison")
def criterion_6(r: CriterionResult) -> None:
    e = builtin("yu_oh")
    s = e.scenario
    r.check(s.is_valid, f"saturated scenario Valid ({s.n} atoms, {len(s.cliques)} maximal cliques)")
    n01 = len(enumerate_01(s))
    r.check(n01 > 0, f"{n01} 0-1 states")
    total = sum(s.projector(lab).matrix for lab in YU_OH_WITNESS)
    dev = fro(total - 4 / 3 * np.eye(3))
    r.check(dev < 1e-9, f"sum of witness projectors = 4/3 I within {dev:.2e}")
    ineq = e.inequalities["yu_oh"]
    rng = np.random.default_rng(613)
    vals = [eval_inequality(s, ineq, induce(s, random_density_matrix(3, rng))) for _ in range(5)]
    r.check(all(abs(v - 4 / 3) < 1e-9 for v in vals), "witness at 5 random density matrices: " + ", ".join(f"{v:.12g}" for v in vals))
    nc = nc_bound(s, ineq)
    r.check(nc == 1.0, f"NC bound {nc:.9g} == 1")
    pair = ks_sisc_check(s)
    r.check(pair == (False, False), f"ks_sisc_check = {pair}")


_SMALL_EXTRA = {
    "K4": lambda: from_graph(["a", "b", "c", "d"], [(i, j) for i in range(4) for j in range(i + 1, 4)], "K4"),
}


def _catalog_names() -> list[str]:
    return ["chsh", "hardy", "ghz322", "kcbs", "ceg18", "ceg17", "yu_oh", "shared_event_d3", "triangle", "cycle5"]


@functools.lru_cache(maxsize=None)
def _sweep(n_random: int = 100, seed: int = 7) -> tuple:
    """Classify catalog states plus random states on every catalog scenario."""
    rows = []
    for k, name in enumerate(_catalog_names()):
        e = builtin(name)
        s = e.scenario
        en = enumerate_01(s)
        rng = np.random.default_rng(seed + k)
        named = list(e.states.items())
        randoms = [(f"random{i}", p) for i, p in enumerate(random_states(s, rng, n_random))]
        for label, p in named + randoms:
            try:
                rep = classify(s, p, states=en)
                rows.append((name, label, p, rep, None))
            except HierarchyError as exc:
                rows.append((name, label, p, None, str(exc)))
    return tuple(rows)


@_timed("7a", "LP membership agrees with a Caratheodory oracle on small scenarios")
def criterion_7a(r: CriterionResult) -> None:
    scen: list[tuple[str, Scenario, list[GraphState]]] = []
    for name in ("kcbs", "shared_event_d3", "triangle", "cycle5", "cycle3"):
        e = builtin(name)
        scen.append((name, e.scenario, list(e.states.values())))
    for name, make in _SMALL_EXTRA.items():
        scen.append((name, make(), []))
    for k, (name, s, states) in enumerate(scen):
        if s.n > 12:
            continue
        rng = np.random.default_rng(100 + k)
        states = states + random_states(s, rng, 30)
        en = enumerate_01(s)
        pts = [z.vector(s.n) for z in en]
        agree = 0
        for p in states:
            lp_member = noncontextual_fraction(s, p, states=en).w_nc >= 1 - EPS_LP
            agree += lp_member == caratheodory_member(pts, p.probs)
        r.check(agree == len(states), f"{name}: {agree}/{len(states)} states agree ({len(en)} 0-1 states)")


@_timed("7b", "strong contextuality iff contextual fraction 1")
def criterion_7b(r: CriterionResult) -> None:
    per: dict[str, list[int]] = {}
    for name, label, p, rep, err in _sweep():
        tally = per.setdefault(name, [0, 0])
        tally[1] += 1
        if rep is not None and rep.strongly_contextual == (rep.fraction.w_nc <= EPS_LP):
            tally[0] += 1
    for name, (ok, total) in per.items():
        r.check(ok == total and total >= 100, f"{name}: {ok}/{total} pairs")


@_timed("7c", "KS contextuality equals strong contextuality of the maximally mixed state")
def criterion_7c(r: CriterionResult) -> None:
    for name in _catalog_names():
        s = builtin(name).scenario
        if s.realization is None or not s.is_valid:
            continue
        pair = ks_sisc_check(s)
        r.check(pair[0] == pair[1], f"{name}: {pair}")


@_timed("7d", "hierarchy implications hold on every tested pair")
def criterion_7d(r: CriterionResult) -> None:
    rows = _sweep()
    errors = [(n, lab, err) for n, lab, _, _, err in rows if err is not None]
    for n, lab, err in errors[:5]:
        r.check(False, f"{n}/{lab}: {err}")
    bad = 0
    for _, _, _, rep, _ in rows:
        if rep is None:
            continue
        f = rep.flags()
        bad += (f["strongly_contextual"] and not f["logically_contextual"]) or (
            f["logically_contextual"] and not f["contextual"]
        )
    r.check(not errors and bad == 0, f"{len(rows)} pairs, {len(errors) + bad} violations")


@_timed("7e", "event monotonicity and exclusivity on all cliques")
def criterion_7e(r: CriterionResult) -> None:
    rng = np.random.default_rng(75)
    mono = excl = checked = 0
    for name, _, p, _, _ in _sweep():
        s = builtin(name).scenario
        for c in s.cliques:
            members = np.array(c)
            # a random pair of nested events e1 <= e2 inside the clique, plus the clique itself
            keep2 = rng.random(len(c)) < 0.6
            keep1 = keep2 & (rng.random(len(c)) < 0.5)
            e1 = event(s, members[keep1].tolist())
            e2 = event(s, members[keep2].tolist())
            whole = event(s, c)
            mono += event_prob(p, e1) > event_prob(p, e2) + EPS_STATE
            excl += max(event_prob(p, e2), event_prob(p, whole)) > 1 + EPS_STATE
            checked += 1
    r.check(mono == 0, f"monotonicity violations: {mono} of {checked} nested event pairs")
    r.check(excl == 0, f"exclusivity violations: {excl} of {checked} cliques")


@_timed("8", "abstract cycles and the shared-event scenario")
def criterion_8(r: CriterionResult) -> None:
    for n in (3, 5):
        s = builtin(f"cycle{n}").scenario
        n01 = len(enumerate_01(s))
        r.check(n01 == 0, f"C{n}: {n01} 0-1 states (expected none)")
        try:
            half = validate_state(s, np.full(n, 0.5))
        except StateError as exc:
            r.check(False, f"C{n}: all-1/2 is not a state ({exc})")
            continue
        strong = is_strongly_contextual(s, half)
        cf = noncontextual_fraction(s, half).contextual_fraction
        r.check(strong and abs(cf - 1) < EPS_LP, f"C{n}: all-1/2 strongly contextual={strong}, CF = {cf:.9g}")
    e = builtin("shared_event_d3")
    s = e.scenario
    shared = set(s.cliques[0]).intersection(*map(set, s.cliques[1:])) if len(s.cliques) > 1 else set()
    r.check(len(s.cliques) == 2 and len(shared) == 1,
            f"{len(s.cliques)} maximal cliques sharing {[s.labels[v] for v in sorted(shared)]}")
    a0 = s.index("0")
    ctx_a = next(c for c in s.cliques if s.index("1") in c)
    ctx_b = next(c for c in s.cliques if s.index("x") in c)
    r.check(a0 in ctx_a and a0 in ctx_b, "A=a0 and B=b0 are one atom, present in both contexts")
    rng = np.random.default_rng(8)
    states = random_states(s, rng, 20)
    r.check(all(abs(p.probs[list(ctx_a)].sum() - 1) < EPS_STATE for p in states),
            f"{len(states)} random states share p(A=a0) = p(B=b0) by construction")


@_timed("9", "LP solver agrees with basis enumeration and is deterministic")
def criterion_9(r: CriterionResult) -> None:
    rng = np.random.default_rng(99)
    agree = total = 0
    worst = 0.0
    for _ in range(60):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 9 - n))
        A = rng.integers(-4, 5, size=(m, n)).astype(float)
        b = rng.integers(-2, 8, size=m).astype(float)
        A = np.vstack([A, np.ones((1, n))])
        b = np.append(b, 10.0)  # keeps every program bounded
        c = rng.normal(size=n)
        sol = solve(LinearProgram.from_arrays(c, A_ub=A, b_ub=b))
        ref = basis_enumeration_max(A, b, c)
        total += 1
        if ref is None:
            agree += sol.status is LPStatus.INFEASIBLE
        elif sol.status is LPStatus.OPTIMAL:
            worst = max(worst, abs(sol.value - ref))
            agree += abs(sol.value - ref) < 1e-6
    r.check(agree == total and total >= 50, f"{agree}/{total} random programs agree, max |diff| {worst:.2e}")
    one = solve(_determinism_program())
    two = solve(_determinism_program())
    same = one.primal.tobytes() == two.primal.tobytes() and one.dual.tobytes() == two.dual.tobytes()
    r.check(same and one.value == two.value, "two solves of the same program are byte-identical")


def _determinism_program() -> LinearProgram:
    from .classify import state_polytope_lp

    s = builtin("kcbs").scenario
    return state_polytope_lp(s, np.linspace(-1, 1, s.n))


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7a,
    criterion_7b,
    criterion_7c,
    criterion_7d,
    criterion_7e,
    criterion_8,
    criterion_9,
)


def run_all() -> list[CriterionResult]:
    return [fn() for fn in CRITERIA]
