"""Independent reference solvers for desk-scale instances.

:func:`solve_full` maximises the agent's date-1 expected payoff over the
whole history tree for a fixed initial type, imposing the firm break-even
condition and *every* pairwise truth-telling constraint at every reporting
date, with no reduction tricks: the objective is linear in the node
utilities, the break-even condition is convex, and the incentive rows are
linear, so the feasible set is convex and the augmented-Lagrangian /
projected-ascent iteration is globally convergent.  A final active-set
Newton polish drives the KKT residual to near machine precision, which is
what makes this solver usable as a ground-truth comparison for the
closed-form and reduced solvers.

:func:`best_deviation` is the complementary audit: given any policy it
computes, by backward induction over reported histories, the value of the
agent's best reporting strategy and compares it with truth-telling.  A
policy is certified incentive compatible when the gap is numerically zero.

Both solves are deterministic (fixed starts and iteration schedules) and
stateless, so concurrent use on separate instances is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .model import (
    ModelConfig,
    Policy,
    validate,
)
from .utility import phi_prime_relaxed, phi_relaxed, phi_second_relaxed

__all__ = [
    "FullProgram",
    "FullSolution",
    "DeviationReport",
    "OracleError",
    "build_full_program",
    "solve_full",
    "best_deviation",
]

DESK_MAX_T = 4
DESK_MAX_TYPES = 3


class OracleError(RuntimeError):
    """The reference solver exceeded its iteration budget."""


# ---------------------------------------------------------------------------
# Program assembly
# ---------------------------------------------------------------------------

@dataclass
class FullProgram:
    """The flattened full-tree program for one initial type.

    One variable per (date, history) node, laid out date by date in the
    same lexicographic order as :class:`Policy`.  ``objective`` holds the
    agent-belief discounted weight of each node; ``budget_weights`` the
    firm-belief discounted probability entering break-even; ``ic_rows``
    one linear row per ordered type pair and reporting history, in the
    "deviation payoff minus truthful payoff <= 0" orientation.
    """

    config: ModelConfig
    delta1_index: int
    income: float
    offsets: list[int]
    sizes: list[int]
    objective: np.ndarray
    budget_weights: np.ndarray
    ic_rows: np.ndarray
    ic_labels: list[tuple[int, tuple[int, ...], int, int]]
    lower_bound: float
    upper_bound: float | None

    @property
    def n_vars(self) -> int:
        return self.offsets[-1] + self.sizes[-1]

    def budget_value(self, x: np.ndarray) -> float:
        return float(
            np.dot(self.budget_weights, phi_relaxed(self.config.utility, x))
            - self.income)

    def budget_grad(self, x: np.ndarray) -> np.ndarray:
        return self.budget_weights * phi_prime_relaxed(self.config.utility, x)

    def budget_hess_diag(self, x: np.ndarray) -> np.ndarray:
        return self.budget_weights * phi_second_relaxed(self.config.utility, x)

    def to_policy(self, x: np.ndarray) -> Policy:
        values = [
            x[self.offsets[t]:self.offsets[t] + self.sizes[t]].copy()
            for t in range(len(self.sizes))
        ]
        return Policy(self.config.T, self.config.n_types,
                      self.delta1_index, values)

    def flatten(self, policy: Policy) -> np.ndarray:
        return np.concatenate(policy.values)


def build_full_program(config: ModelConfig, delta1_index: int, *,
                       income: float | None = None) -> FullProgram:
    config = validate(config, allow_boundary_q=True)
    T, N = config.T, config.n_types
    if T > DESK_MAX_T or N > DESK_MAX_TYPES:
        raise ValueError(
            f"reference solver is desk-scale only (T <= {DESK_MAX_T}, "
            f"N <= {DESK_MAX_TYPES}); got T={T}, N={N}")
    if not 1 <= delta1_index <= N:
        raise ValueError(f"initial type index {delta1_index} outside 1..{N}")
    I_T = config.income_npv() if income is None else income

    skeleton = Policy(T, N, delta1_index)
    sizes = [len(v) for v in skeleton.values]
    offsets = [0]
    for s in sizes[:-1]:
        offsets.append(offsets[-1] + s)
    n_vars = offsets[-1] + sizes[-1]

    def var(t: int, hist: tuple[int, ...]) -> int:
        return offsets[t - 1] + skeleton._index(t, hist)

    # Agent-belief continuation coefficient vectors, one per history node.
    cont: dict[tuple[int, ...], np.ndarray] = {}

    def cont_coef(hist: tuple[int, ...]) -> np.ndarray:
        if hist in cont:
            return cont[hist]
        t = len(hist)
        c = np.zeros(n_vars)
        if t == T - 1:
            c[var(T, hist)] = 1.0
        else:
            for n in range(1, N + 1):
                child = hist + (n,)
                c[var(t + 1, child)] += config.q[n - 1]
                c += config.q[n - 1] * config.delta(n) * cont_coef(child)
        cont[hist] = c
        return c

    root = (delta1_index,)
    objective = np.zeros(n_vars)
    objective[var(1, root)] = 1.0
    objective += config.delta(delta1_index) * cont_coef(root)

    budget_weights = np.zeros(n_vars)
    budget_weights[var(1, root)] = 1.0
    for t in range(2, T + 1):
        for hist in skeleton.node_histories(t):
            prob = float(np.prod([config.p[n - 1] for n in hist[1:]]))
            budget_weights[var(t, hist)] += prob / config.R ** (t - 1)

    rows = []
    labels = []
    for t in range(2, T):
        for hist in skeleton.node_histories(t - 1):
            for n in range(1, N + 1):
                for m in range(1, N + 1):
                    if m == n:
                        continue
                    truth, lie = hist + (n,), hist + (m,)
                    row = np.zeros(n_vars)
                    row[var(t, lie)] += 1.0
                    row[var(t, truth)] -= 1.0
                    row += config.delta(n) * (cont_coef(lie) - cont_coef(truth))
                    rows.append(row)
                    labels.append((t, hist, n, m))
    ic_rows = np.array(rows) if rows else np.zeros((0, n_vars))

    spec = config.utility
    if spec.is_bounded_below:
        lb, ub = spec.floor_utility, None
    else:
        lb = float(spec.u(1e-9 * I_T))
        ub = float(spec.u(1e3 * I_T))
    return FullProgram(
        config=config, delta1_index=delta1_index, income=I_T,
        offsets=offsets, sizes=sizes, objective=objective,
        budget_weights=budget_weights, ic_rows=ic_rows, ic_labels=labels,
        lower_bound=lb, upper_bound=ub,
    )


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

@dataclass
class FullSolution:
    policy: Policy
    objective_value: float
    x: np.ndarray
    lam: float
    ic_multipliers: np.ndarray
    kkt_residual: float
    iterations: int


def solve_full(program: FullProgram, *, x0: np.ndarray | None = None,
               max_inner_iter: int = 100_000) -> FullSolution:
    """Maximise the program; augmented Lagrangian then active-set polish.

    Deterministic: the default start is the flat policy spending half the
    income evenly, multipliers start at zero, and the penalty grows by a
    fixed factor each round.
    """
    cfg = program.config
    spec = cfg.utility
    n = program.n_vars
    if x0 is None:
        level = spec.u(program.income / (2.0 * cfg.T))
        x = np.full(n, float(level))
    else:
        x = np.asarray(x0, dtype=float).copy()
    lo = np.full(n, program.lower_bound)
    hi = np.full(n, np.inf if program.upper_bound is None
                 else program.upper_bound)
    x = np.clip(x, lo, np.where(np.isfinite(hi), hi, x.max() + 1.0))

    A = program.ic_rows
    c = program.objective
    mu_ic = np.zeros(len(A))
    mu_b = 0.0
    rho = 10.0
    total_evals = 0

    def constraint_values(x):
        return program.budget_value(x), A @ x if len(A) else np.zeros(0)

    for _ in range(8):
        def fun(x):
            b, g = constraint_values(x)
            act_b = max(0.0, mu_b + rho * b)
            act_g = np.maximum(0.0, mu_ic + rho * g)
            val = (-c @ x
                   + (act_b ** 2 - mu_b ** 2) / (2.0 * rho)
                   + float(np.sum(act_g ** 2 - mu_ic ** 2)) / (2.0 * rho))
            grad = -c + act_b * program.budget_grad(x)
            if len(A):
                grad = grad + A.T @ act_g
            return val, grad

        res = minimize(
            fun, x, jac=True, method="L-BFGS-B",
            bounds=list(zip(lo, [None if not np.isfinite(h) else h
                                 for h in hi])),
            options={"maxiter": 4000, "ftol": 1e-16, "gtol": 1e-12},
        )
        x = res.x
        total_evals += res.nfev
        if total_evals > max_inner_iter:
            raise OracleError(
                f"iteration cap exceeded: {total_evals} evaluations, "
                f"violation {_max_violation(program, x):.3e}")
        b, g = constraint_values(x)
        mu_b = max(0.0, mu_b + rho * b)
        mu_ic = np.maximum(0.0, mu_ic + rho * g)
        if _max_violation(program, x) < 1e-10 and rho >= 1e4:
            break
        rho *= 10.0

    x, lam, mu_full, kkt = _polish(program, x, mu_b, mu_ic, lo)
    return FullSolution(
        policy=program.to_policy(x),
        objective_value=float(c @ x),
        x=x, lam=lam, ic_multipliers=mu_full,
        kkt_residual=kkt, iterations=total_evals,
    )


def _max_violation(program: FullProgram, x: np.ndarray) -> float:
    b = program.budget_value(x)
    worst = max(0.0, b)
    if len(program.ic_rows):
        worst = max(worst, float(np.max(program.ic_rows @ x, initial=0.0)))
    return worst


def _polish(program: FullProgram, x: np.ndarray, mu_b: float,
            mu_ic: np.ndarray, lo: np.ndarray
            ) -> tuple[np.ndarray, float, np.ndarray, float]:
    """Active-set Newton refinement of an approximate KKT point.

    Works on the equality system formed by the budget, the currently
    active incentive rows and the active floor bounds; constraint drops
    and adds are re-detected after each converged solve, capped at 20
    outer corrections.
    """
    A = program.ic_rows
    c = program.objective
    n = len(x)
    x = x.copy()
    g = A @ x if len(A) else np.zeros(0)
    active_ic = set(np.nonzero((mu_ic > 1e-8) | (g > -1e-6))[0].tolist())
    fixed = set(np.nonzero(x - lo <= 1e-6)[0].tolist())
    lam = mu_b if mu_b > 0 else 1.0
    mu = {i: max(mu_ic[i], 0.0) for i in active_ic}

    for _ in range(20):
        act = sorted(active_ic)
        free = np.array(sorted(set(range(n)) - fixed), dtype=int)
        for j in fixed:
            x[j] = lo[j]
        k = len(act)
        A_act = A[act] if k else np.zeros((0, n))
        mu_vec = np.array([mu.get(i, 0.0) for i in act])

        for _newton in range(80):
            db = program.budget_grad(x)
            r1 = (c - lam * db)[free]
            if k:
                r1 = r1 - (A_act.T @ mu_vec)[free]
            r2 = A_act @ x if k else np.zeros(0)
            r3 = np.array([program.budget_value(x)])
            resid = np.concatenate([r1, r2, r3])
            if np.max(np.abs(resid)) < 1e-13:
                break
            m = len(free)
            H = np.zeros((m + k + 1, m + k + 1))
            hess = program.budget_hess_diag(x)[free]
            H[:m, :m] = -lam * np.diag(hess)
            if k:
                H[:m, m:m + k] = -A_act[:, free].T
                H[m:m + k, :m] = A_act[:, free]
            H[:m, m + k] = -db[free]
            H[m + k, :m] = db[free]
            try:
                step = np.linalg.solve(H, -resid)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(H, -resid, rcond=None)
            x[free] += step[:m]
            if k:
                mu_vec = mu_vec + step[m:m + k]
            lam += step[m + k]

        mu = {i: float(v) for i, v in zip(act, mu_vec)}
        changed = False
        # Drop incentive rows with negative multipliers.
        negative = [i for i in act if mu[i] < -1e-9]
        if negative:
            worst = min(negative, key=lambda i: mu[i])
            active_ic.discard(worst)
            mu.pop(worst, None)
            changed = True
        # Add violated inactive rows.
        if len(A):
            g = A @ x
            for i in range(len(A)):
                if i not in active_ic and g[i] > 1e-9:
                    active_ic.add(i)
                    mu[i] = 0.0
                    changed = True
        # Fix variables that crossed the floor; release wrongly fixed ones.
        for j in np.nonzero(x < lo - 1e-9)[0]:
            if j not in fixed:
                fixed.add(int(j))
                changed = True
        if fixed:
            db = program.budget_grad(x)
            dual = lam * db - c
            if len(A) and mu:
                act_now = sorted(mu)
                dual = dual + A[act_now].T @ np.array([mu[i] for i in act_now])
            for j in sorted(fixed):
                if dual[j] < -1e-9:
                    fixed.discard(j)
                    changed = True
                    break
        if not changed:
            break

    kkt = _kkt_residual(program, x, lam, mu, fixed, lo)
    mu_full = np.zeros(len(A))
    for i, v in mu.items():
        mu_full[i] = v
    return x, float(lam), mu_full, kkt


def _kkt_residual(program: FullProgram, x, lam, mu, fixed, lo) -> float:
    A = program.ic_rows
    c = program.objective
    db = program.budget_grad(x)
    grad = c - lam * db
    if len(A) and mu:
        act = sorted(mu)
        grad = grad - A[act].T @ np.array([mu[i] for i in act])
    worst = abs(program.budget_value(x))
    free = sorted(set(range(len(x))) - fixed)
    if free:
        worst = max(worst, float(np.max(np.abs(grad[free]))))
    if fixed:
        worst = max(worst, float(np.max(np.maximum(0.0, grad[list(fixed)]))))
        worst = max(worst, float(np.max(np.abs(x[list(fixed)] - lo[list(fixed)]))))
    if len(A):
        worst = max(worst, float(np.max(np.maximum(0.0, A @ x))))
    if mu:
        worst = max(worst, max(0.0, -min(mu.values())))
    worst = max(worst, max(0.0, -lam))
    return worst


# ---------------------------------------------------------------------------
# Deviation audit
# ---------------------------------------------------------------------------

@dataclass
class DeviationReport:
    best_value: float
    truthful_value: float
    witness: dict[tuple[int, tuple[int, ...], int], int] = field(
        default_factory=dict)

    @property
    def gap(self) -> float:
        return self.best_value - self.truthful_value


def best_deviation(policy: Policy, config: ModelConfig, delta1_index: int,
                   *, gap_tol: float = 1e-8) -> DeviationReport:
    """Value of the agent-belief-optimal reporting strategy against a policy.

    Backward induction over reported histories: at each reporting date the
    agent of each true current type picks the report maximising current
    utility plus his discounted expected continuation under optimal future
    play.  Ties break in favour of truth, so the gap is exactly zero on a
    strictly incentive-compatible policy.  ``witness`` records every node
    where the optimal report differs from the truth (populated only when
    the gap exceeds ``gap_tol``).
    """
    config = validate(config, allow_boundary_q=True)
    T, N = config.T, config.n_types
    if policy.root_index is not None and policy.root_index != delta1_index:
        raise ValueError(
            f"policy is pinned to initial type {policy.root_index}, "
            f"asked for {delta1_index}")

    best_cont: dict[tuple[int, ...], float] = {}
    true_cont: dict[tuple[int, ...], float] = {}
    choices: dict[tuple[int, tuple[int, ...], int], int] = {}

    def walk(hist: tuple[int, ...]) -> tuple[float, float]:
        """(optimal, truthful) continuation value after reported ``hist``."""
        if hist in best_cont:
            return best_cont[hist], true_cont[hist]
        t = len(hist)
        if t == T - 1:
            v = policy.get(T, hist)
            best_cont[hist] = true_cont[hist] = v
            return v, v
        best_total = 0.0
        true_total = 0.0
        for n in range(1, N + 1):
            d = config.delta(n)
            truthful_child = hist + (n,)
            # Ties break in favour of truth: a deviation must strictly win.
            best_choice = (policy.get(t + 1, truthful_child)
                           + d * walk(truthful_child)[0])
            best_report = n
            for m in range(1, N + 1):
                if m == n:
                    continue
                child = hist + (m,)
                value = policy.get(t + 1, child) + d * walk(child)[0]
                if value > best_choice + 1e-15:
                    best_choice, best_report = value, m
            truthful = (policy.get(t + 1, truthful_child)
                        + d * walk(truthful_child)[1])
            choices[(t + 1, hist, n)] = best_report
            best_total += config.q[n - 1] * best_choice
            true_total += config.q[n - 1] * truthful
        best_cont[hist] = best_total
        true_cont[hist] = true_total
        return best_total, true_total

    root = (delta1_index,)
    opt, tru = walk(root)
    d1 = config.delta(delta1_index)
    v1 = policy.get(1, root)
    best_value = v1 + d1 * opt
    truthful_value = v1 + d1 * tru
    witness = {}
    if best_value - truthful_value > gap_tol:
        witness = {key: rep for key, rep in choices.items()
                   if rep != key[2]}
    assert truthful_value <= best_value + 1e-12
    return DeviationReport(best_value=float(best_value),
                           truthful_value=float(truthful_value),
                           witness=witness)
