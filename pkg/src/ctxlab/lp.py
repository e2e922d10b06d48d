"""Dense two-phase primal simplex with Bland's rule.

Programs are maximizations over nonnegative variables with ``<=``, ``=`` and
``>=`` rows. Duals are always returned, with the sign convention of the
standard max/min pair: ``y >= 0`` on ``<=`` rows, ``y <= 0`` on ``>=`` rows,
free on equalities, and ``A^T y >= c``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
import numpy as np

EPS_LP = 1e-7
_NOISE = 1e-11
_RELATIONS = ("<=", "=", ">=")


class LPError(ValueError):
    """Malformed linear program."""


class LPNumericalError(ArithmeticError):
    """The simplex could not continue: only sub-tolerance pivots were available."""


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class Constraint:
    coeffs: np.ndarray
    relation: str
    rhs: float


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximize ``objective @ x`` subject to the constraints and ``x >= 0``."""

    objective: np.ndarray
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        if c.size == 0:
            raise LPError("program has no variables")
        if not np.all(np.isfinite(c)):
            raise LPError("objective has non-finite coefficients")
        rows = []
        for k, con in enumerate(self.constraints):
            a = np.asarray(con.coeffs, dtype=float).ravel()
            if a.size != c.size:
                raise LPError(f"constraint {k} has {a.size} coefficients, expected {c.size}")
            if con.relation not in _RELATIONS:
                raise LPError(f"constraint {k} has unknown relation {con.relation!r}")
            if not (np.all(np.isfinite(a)) and np.isfinite(con.rhs)):
                raise LPError(f"constraint {k} has non-finite data")
            rows.append(Constraint(a, con.relation, float(con.rhs)))
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(rows))

    @classmethod
    def from_arrays(cls, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, A_ge=None, b_ge=None) -> "LinearProgram":
        cons: list[Constraint] = []
        for A, b, rel in ((A_ub, b_ub, "<="), (A_eq, b_eq, "="), (A_ge, b_ge, ">=")):
            if A is None:
                continue
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.asarray(b, dtype=float).ravel()
            if A.shape[0] != b.size:
                raise LPError(f"{A.shape[0]} rows but {b.size} right-hand sides")
            cons.extend(Constraint(A[i], rel, float(b[i])) for i in range(A.shape[0]))
        return cls(np.asarray(c, dtype=float), tuple(cons))

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def arrays(self) -> tuple[np.ndarray, list[str], np.ndarray]:
        if not self.constraints:
            return np.zeros((0, self.n_vars)), [], np.zeros(0)
        A = np.array([con.coeffs for con in self.constraints])
        b = np.array([con.rhs for con in self.constraints])
        return A, [con.relation for con in self.constraints], b


@dataclass(frozen=True, eq=False)
class LPSolution:
    status: LPStatus
    value: float
    primal: np.ndarray
    dual: np.ndarray
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int], eps: float, max_iter: int):
        self.T = T
        self.basis = basis
        self.eps = eps
        self.iterations = 0
        self.max_iter = max_iter

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] /= T[r, c]
        rows = np.flatnonzero(T[:, c])
        rows = rows[rows != r]
        T[rows] -= np.outer(T[rows, c], T[r])
        self.basis[r] = c
        self.iterations += 1

    def optimize(self, cost_row: np.ndarray, allowed: np.ndarray) -> bool:
        """Maximize; ``cost_row`` holds reduced costs and is pivoted in place. False if unbounded."""
        T, eps = self.T, self.eps
        while True:
            cand = np.flatnonzero((cost_row[:-1] > eps) & allowed)
            if cand.size == 0:
                return True
            if self.iterations >= self.max_iter:
                raise LPNumericalError(f"simplex exceeded {self.max_iter} pivots")
            j = int(cand[0])
            col = T[:, j]
            pos = np.flatnonzero(col > eps)
            if pos.size == 0:
                if np.any(col > _NOISE):
                    raise LPNumericalError(
                        f"entering column {j} has only sub-tolerance pivots (max {col.max():.3g})"
                    )
                return False
            ratios = T[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * (1 + abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            cost_row -= cost_row[j] * T[r]


def solve(lp: LinearProgram, eps: float = EPS_LP) -> LPSolution:
    A0, rels, b0 = lp.arrays()
    m, n = A0.shape
    c = lp.objective

    sign = np.where(b0 < 0, -1.0, 1.0)
    A = A0 * sign[:, None]
    b = b0 * sign
    rels = [r if s > 0 else {"<=": ">=", ">=": "<=", "=": "="}[r] for r, s in zip(rels, sign)]

    ineq = [i for i, r in enumerate(rels) if r != "="]
    n_slack = len(ineq)
    S = np.zeros((m, n_slack))
    for k, i in enumerate(ineq):
        S[i, k] = 1.0 if rels[i] == "<=" else -1.0
    A_std = np.hstack([A, S])
    n_std = n + n_slack

    # every row starts with a unit basic column: its slack for "<=" rows, an artificial otherwise
    basis: list[int] = []
    unit_col: list[int] = []
    n_art = 0
    for i in range(m):
        if rels[i] == "<=":
            basis.append(n + ineq.index(i))
        else:
            basis.append(n_std + n_art)
            n_art += 1
        unit_col.append(basis[-1])
    Art = np.zeros((m, n_art))
    for i in range(m):
        if unit_col[i] >= n_std:
            Art[i, unit_col[i] - n_std] = 1.0
    n_cols = n_std + n_art

    T = np.hstack([A_std, Art, b[:, None]])
    tab = _Tableau(T, basis, eps, max_iter=max(1000, 50 * (m + n_cols)))
    is_real = np.zeros(n_cols, dtype=bool)
    is_real[:n_std] = True

    if n_art:
        cost = np.zeros(n_cols + 1)
        cost[n_std:n_cols] = -1.0
        row = cost - cost[basis] @ T
        tab.optimize(row, np.ones(n_cols, dtype=bool))
        infeas = float(sum(tab.T[i, -1] for i in range(m) if basis[i] >= n_std))
        if infeas > eps * (1 + float(np.abs(b).max(initial=0.0))):
            return LPSolution(LPStatus.INFEASIBLE, float("nan"), np.full(n, np.nan), np.zeros(m), tab.iterations)
        # drive remaining artificials out of the basis; rows where that is impossible are redundant
        keep = []
        for i in range(m):
            if basis[i] >= n_std:
                mags = np.abs(tab.T[i, :n_std])
                j = int(np.argmax(mags))
                if mags[j] <= eps:
                    continue
                tab.pivot(i, j)
            keep.append(i)
        if len(keep) < m:
            tab.T = tab.T[keep]
            tab.basis = [basis[i] for i in keep]

    # phase 2 keeps the artificial columns (never entering) so duals can be read off the cost row
    cost = np.zeros(n_cols + 1)
    cost[:n] = c
    row = cost - cost[tab.basis] @ tab.T
    bounded = tab.optimize(row, is_real)
    if not bounded:
        return LPSolution(LPStatus.UNBOUNDED, float("inf"), np.full(n, np.nan), np.zeros(m), tab.iterations)

    x = np.zeros(n_cols)
    x[tab.basis] = tab.T[:, -1]
    x = np.where(np.abs(x) < _NOISE, 0.0, x)
    primal = x[:n]

    # reduced cost of row i's unit column is -y_i
    y = -row[unit_col] * sign
    y = np.where(np.abs(y) < _NOISE, 0.0, y) + 0.0
    value = float(c @ primal)
    return LPSolution(LPStatus.OPTIMAL, value, primal, y, tab.iterations)


def maximize(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, A_ge=None, b_ge=None, eps: float = EPS_LP) -> LPSolution:
    return solve(LinearProgram.from_arrays(c, A_ub, b_ub, A_eq, b_eq, A_ge, b_ge), eps)


def check_optimality(lp: LinearProgram, sol: LPSolution, eps: float = EPS_LP) -> list[str]:
    """Primal feasibility, dual feasibility, complementary slackness and zero gap."""
    problems: list[str] = []
    A, rels, b = lp.arrays()
    x, y = sol.primal, sol.dual
    scale = 1 + float(np.abs(b).max(initial=0.0))
    if np.any(x < -eps):
        problems.append("negative primal variable")
    ax = A @ x if A.size else np.zeros(0)
    for i, r in enumerate(rels):
        if r == "<=" and ax[i] > b[i] + eps * scale:
            problems.append(f"row {i} violated")
        if r == ">=" and ax[i] < b[i] - eps * scale:
            problems.append(f"row {i} violated")
        if r == "=" and abs(ax[i] - b[i]) > eps * scale:
            problems.append(f"row {i} violated")
        if r == "<=" and y[i] < -eps or r == ">=" and y[i] > eps:
            problems.append(f"dual {i} has the wrong sign")
    reduced = (A.T @ y if A.size else np.zeros(lp.n_vars)) - lp.objective
    if np.any(reduced < -eps * scale * 10):
        problems.append("dual infeasible")
    if np.any((np.abs(x) > eps) & (np.abs(reduced) > eps * scale * 10)):
        problems.append("complementary slackness fails on variables")
    if abs(float(b @ y) - sol.value) > eps * (1 + abs(sol.value)):
        problems.append("duality gap")
    return problems


__all__ = [
    "EPS_LP",
    "Constraint",
    "LPError",
    "LPNumericalError",
    "LPSolution",
    "LPStatus",
    "LinearProgram",
    "check_optimality",
    "maximize",
    "solve",
]
