"""Contextuality hierarchy: noncontextual fraction, logical and strong contextuality,
inequality bounds and the state-independent/KS comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .assign import DEFAULT_LIMIT, Enumeration, ZeroOneState, enumerate_01, find_01, is_ks_contextual
from .linalg import maximally_mixed
from .lp import EPS_LP, LinearProgram, LPStatus, solve
from .scenario import Scenario, ScenarioError
from .states import TAU_ZERO, GraphState, induce, support


class AnalysisRefused(RuntimeError):
    """The analysis would need an exhaustive 0-1 enumeration that was truncated."""


class HierarchyError(AssertionError):
    """Classification flags violate the hierarchy implications (an internal bug)."""


@dataclass(frozen=True)
class InequalitySpec:
    weights: Mapping[str, float]
    name: str = ""

    def __post_init__(self):
        w = {str(k): float(v) for k, v in dict(self.weights).items()}
        if not any(v != 0 for v in w.values()):
            raise ValueError("inequality needs at least one nonzero weight")
        object.__setattr__(self, "weights", w)

    def vector(self, s: Scenario) -> np.ndarray:
        out = np.zeros(s.n)
        for lab, x in self.weights.items():
            try:
                out[s.index(lab)] = x
            except KeyError:
                raise KeyError(f"inequality {self.name or '?'} refers to unknown vertex {lab!r}") from None
        return out

    def scaled(self, c: float) -> "InequalitySpec":
        return InequalitySpec({k: c * v for k, v in self.weights.items()}, self.name)


@dataclass(frozen=True, eq=False)
class FractionResult:
    """Largest noncontextual weight ``w_nc`` with ``sum_d b_d * d <= p``.

    ``dual`` is an optimal dual vector ``y >= 0``: ``y . d >= 1`` for every 0-1
    state ``d`` while ``y . p = w_nc``. When ``w_nc < 1`` the inequality
    ``sum_v y_v q(v) >= 1`` holds on the noncontextual polytope and is violated by ``p``.
    """

    w_nc: float
    decomposition: tuple[tuple[ZeroOneState, float], ...]
    residual: GraphState | None
    dual: np.ndarray
    n_deterministic: int

    @property
    def contextual_fraction(self) -> float:
        return 1.0 - self.w_nc


def _require_complete(e: Enumeration) -> Enumeration:
    if e.truncated:
        raise AnalysisRefused(
            f"0-1 state enumeration truncated at {e.limit}; raise --limit to analyse this scenario exactly"
        )
    return e


def _states(s: Scenario, limit: int | None, states: Enumeration | None) -> Enumeration:
    return _require_complete(states if states is not None else enumerate_01(s, limit))


def noncontextual_fraction(
    s: Scenario,
    p: GraphState,
    *,
    limit: int | None = DEFAULT_LIMIT,
    states: Enumeration | None = None,
    eps: float = EPS_LP,
) -> FractionResult:
    e = _states(s, limit, states)
    if len(e) == 0:
        return FractionResult(0.0, (), p, np.zeros(s.n), 0)
    D = np.array([z.vector(s.n) for z in e.states]).T  # vertices x states
    sol = solve(LinearProgram.from_arrays(np.ones(len(e)), A_ub=D, b_ub=p.probs), eps)
    if sol.status is not LPStatus.OPTIMAL:
        raise ArithmeticError(f"fraction LP ended {sol.status.value}")
    b = sol.primal
    w = float(min(1.0, max(0.0, b.sum())))
    decomp = tuple((z, float(x)) for z, x in zip(e.states, b) if x > eps * 1e-3)
    residual = None
    if w < 1 - 1e-6:
        r = (p.probs - D @ b) / (1 - w)
        residual = GraphState(s, np.clip(r, 0.0, 1.0))
    return FractionResult(w, decomp, residual, sol.dual, len(e))


@dataclass(frozen=True, eq=False)
class Membership:
    noncontextual: bool
    fraction: FractionResult
    violated: InequalitySpec | None = None
    violated_bound: float | None = None


def is_noncontextual(s: Scenario, p: GraphState, **kw) -> Membership:
    fr = noncontextual_fraction(s, p, **kw)
    eps = kw.get("eps", EPS_LP)
    if fr.w_nc >= 1 - eps:
        return Membership(True, fr)
    # -y.q <= -1 on every noncontextual q, while -y.p = -w_nc > -1
    y = fr.dual
    if not np.any(y):
        return Membership(False, fr)
    ineq = InequalitySpec({lab: -float(v) for lab, v in zip(s.labels, y) if v}, "dual")
    return Membership(False, fr, ineq, -1.0)


def is_logically_contextual(
    s: Scenario, p: GraphState, tau: float = TAU_ZERO, states: Enumeration | None = None
) -> tuple[bool, int | None]:
    """Atom-level check: some positive atom lies in no 0-1 state supported inside supp(p).

    Returns the smallest such atom as witness. A complete enumeration, when
    supplied, replaces the per-atom searches.
    """
    sup = support(p, tau)
    covered: set[int] = set()
    if states is not None and not states.truncated:
        for z in states.states:
            if z.support <= sup:
                covered |= z.support
        missing = sorted(sup - covered)
        return (True, missing[0]) if missing else (False, None)
    for a in sorted(sup):
        if a in covered:
            continue
        z = find_01(s, allowed=sup, forced=[a])
        if z is None:
            return True, a
        covered |= z.support
    return False, None


def strong_witness(s: Scenario, p: GraphState, tau: float = TAU_ZERO) -> ZeroOneState | None:
    """A 0-1 state supported inside supp(p), if any."""
    return find_01(s, allowed=support(p, tau))


def is_strongly_contextual(s: Scenario, p: GraphState, tau: float = TAU_ZERO) -> bool:
    return strong_witness(s, p, tau) is None


def is_maximally_contextual(s: Scenario, p: GraphState, eps: float = EPS_LP, **kw) -> bool:
    return noncontextual_fraction(s, p, eps=eps, **kw).w_nc <= eps


def eval_inequality(s: Scenario, ineq: InequalitySpec, p: GraphState) -> float:
    return float(ineq.vector(s) @ p.probs)


def nc_bound(
    s: Scenario, ineq: InequalitySpec, *, limit: int | None = DEFAULT_LIMIT, states: Enumeration | None = None
) -> float:
    """Maximum over 0-1 states; ``-inf`` when there are none."""
    e = _states(s, limit, states)
    if len(e) == 0:
        return float("-inf")
    w = ineq.vector(s)
    return float(max(w[list(z.support)].sum() for z in e.states))


def _independent_rows(A: np.ndarray, tol: float = 1e-9) -> list[int]:
    """Greedy maximal set of linearly independent rows, in input order."""
    basis: list[np.ndarray] = []
    keep = []
    for i, r in enumerate(A):
        v = r.astype(float)
        for q in basis:
            v = v - (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > tol * max(1.0, np.linalg.norm(r)):
            basis.append(v / norm)
            keep.append(i)
    return keep


def state_polytope_lp(s: Scenario, objective: np.ndarray) -> LinearProgram:
    """Graph states as an LP: nonnegative entries, every maximal clique summing to 1.

    Clique rows that are linear combinations of earlier ones are left out; the
    feasible set is unchanged since every clique row has right-hand side 1 and
    the rows kept are consistent.
    """
    A = np.zeros((len(s.cliques), s.n))
    for k, c in enumerate(s.cliques):
        A[k, list(c)] = 1.0
    keep = _independent_rows(A)
    return LinearProgram.from_arrays(objective, A_eq=A[keep], b_eq=np.ones(len(keep)))


def algebraic_bound(s: Scenario, ineq: InequalitySpec, eps: float = EPS_LP) -> float:
    """Maximum over all graph states (clique sums 1, entries nonnegative)."""
    sol = solve(state_polytope_lp(s, ineq.vector(s)), eps)
    if sol.status is LPStatus.INFEASIBLE:
        return float("-inf")
    if sol.status is LPStatus.UNBOUNDED:
        raise ArithmeticError("state polytope LP is unbounded")
    return sol.value


def is_fully_contextual_witness(
    s: Scenario, p: GraphState, ineq: InequalitySpec, eps: float = EPS_LP, **kw
) -> bool:
    alg = algebraic_bound(s, ineq, eps)
    nc = nc_bound(s, ineq, **kw)
    return eval_inequality(s, ineq, p) >= alg - eps and alg > nc + eps


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    noncontextual: bool
    contextual: bool
    logically_contextual: bool
    strongly_contextual: bool
    maximally_contextual: bool
    contextual_fraction: float
    fraction: FractionResult
    logical_witness: int | None
    strong_witness: ZeroOneState | None
    margins: dict = field(default_factory=dict)

    def flags(self) -> dict[str, bool]:
        return {
            "noncontextual": self.noncontextual,
            "contextual": self.contextual,
            "logically_contextual": self.logically_contextual,
            "strongly_contextual": self.strongly_contextual,
            "maximally_contextual": self.maximally_contextual,
        }


def check_hierarchy(flags: Mapping[str, bool]) -> None:
    problems = []
    if flags["noncontextual"] == flags["contextual"]:
        problems.append("noncontextual must equal not contextual")
    if flags["strongly_contextual"] and not flags["logically_contextual"]:
        problems.append("strongly contextual but not logically contextual")
    if flags["logically_contextual"] and not flags["contextual"]:
        problems.append("logically contextual but not contextual")
    if flags["strongly_contextual"] != flags["maximally_contextual"]:
        problems.append("strong and maximal contextuality disagree")
    if problems:
        raise HierarchyError("; ".join(problems))


def classify(
    s: Scenario,
    p: GraphState,
    *,
    limit: int | None = DEFAULT_LIMIT,
    eps: float = EPS_LP,
    tau: float = TAU_ZERO,
    states: Enumeration | None = None,
) -> ClassificationReport:
    e = _states(s, limit, states)
    fr = noncontextual_fraction(s, p, states=e, eps=eps)
    logical, atom = is_logically_contextual(s, p, tau, states=e)
    witness = strong_witness(s, p, tau)
    report = ClassificationReport(
        noncontextual=fr.w_nc >= 1 - eps,
        contextual=fr.w_nc < 1 - eps,
        logically_contextual=logical,
        strongly_contextual=witness is None,
        maximally_contextual=fr.w_nc <= eps,
        contextual_fraction=1.0 - fr.w_nc,
        fraction=fr,
        logical_witness=atom,
        strong_witness=witness,
        margins={"w_nc": fr.w_nc, "to_noncontextual": fr.w_nc - (1 - eps), "to_maximal": eps - fr.w_nc},
    )
    check_hierarchy(report.flags())
    return report


def ks_sisc_check(s: Scenario) -> tuple[bool, bool]:
    """(KS contextual, maximally mixed state strongly contextual); equal in finite dimension."""
    if s.realization is None or not s.is_valid:
        raise ScenarioError("ks_sisc_check needs a Valid realized scenario")
    rho = maximally_mixed(s.realization.dim)
    return is_ks_contextual(s).contextual, is_strongly_contextual(s, induce(s, rho))


__all__ = [
    "AnalysisRefused",
    "ClassificationReport",
    "FractionResult",
    "HierarchyError",
    "InequalitySpec",
    "Membership",
    "algebraic_bound",
    "check_hierarchy",
    "classify",
    "eval_inequality",
    "is_fully_contextual_witness",
    "is_logically_contextual",
    "is_maximally_contextual",
    "is_noncontextual",
    "is_strongly_contextual",
    "ks_sisc_check",
    "nc_bound",
    "noncontextual_fraction",
    "state_polytope_lp",
    "strong_witness",
]
