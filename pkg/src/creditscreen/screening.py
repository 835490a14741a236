"""Solvers for the general model: full-support beliefs over N >= 2 types.

The efficient policy (agent welfare under firm beliefs, break-even, no
incentive constraints) has the closed stationarity form

    phi'(v_t(H^t)) = R**(t-1) * prod_{s<t} delta_s / lambda

with a single budget multiplier found by bisection on the firm-belief
expected break-even condition.

The three-period equilibrium is solved through the binding-upward-IC
reduction: with local upward incentive constraints holding with equality,
the date-2 utilities w_n follow from the lowest type's continuation
utility U_1 and the date-3 utilities z_n via the envelope identity

    w_n = U_1 + sum_{i=2..n} (delta_i - delta_{i-1}) z_i - delta_n z_n,

and the reduced objective is v_1 + delta_1 (U_1 + sum_{n>=2} Qbar_n z_n
(delta_n - delta_{n-1})) with Qbar_n the upper-tail agent-belief mass.
The first-order system in (v_1, U_1, z) for a fixed multiplier is linear
whenever phi' is linear (the square-root family) and is otherwise solved
by damped Newton started from the efficient policy at the same
multiplier; an outer bisection on the multiplier enforces break-even.

The solver is reduction-first, certify-after: it always solves the
reduced program and then checks the separating monotonicity (w strictly
decreasing, z strictly increasing) that validates the reduction.  A
failure raises :class:`NonSeparatingError` carrying the candidate, since
the pooling/ironing case is out of scope and must not be reported as an
answer.

Diagnostics: per-type backloading gaps g_n = phi'(z_n) - delta_n R
phi'(w_n) (zero at the bottom, positive above under optimism), the firm's
expected continuation cost of a date-t report (weakly increasing in the
report), inverse-Euler identity residuals under constant utility shifts,
and expected-consumption growth ratios for logarithmic utility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degenerate import SolverError
from .model import (
    ModelConfig,
    Policy,
    ValidationError,
    ValidationIssue,
    require_full_support_p,
    validate,
)
from .utility import UtilityKind, phi_prime_relaxed, phi_relaxed

__all__ = [
    "EfficientSolution",
    "ReducedSolution",
    "NonSeparatingError",
    "ContinuationCost",
    "BackloadingReport",
    "EulerReport",
    "LogGrowthRatios",
    "solve_efficient_policy",
    "solve_equilibrium_t3",
    "continuation_cost",
    "check_backloading",
    "check_inverse_euler",
    "log_growth_ratios",
]

BISECTION_MAX_ITER = 200
BISECTION_REL_TOL = 1e-12


class NonSeparatingError(RuntimeError):
    """The reduced solution violates the separating monotonicity, so the
    binding-upward-IC reduction is invalid for this instance."""

    def __init__(self, message: str, candidate: "ReducedSolution"):
        super().__init__(message)
        self.candidate = candidate


# ---------------------------------------------------------------------------
# Efficient policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EfficientSolution:
    policy: Policy
    lam: float
    budget_residual: float


def _tree_tables(config: ModelConfig) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-date (probability, discount-product) arrays over history nodes.

    Entry t-1 matches the storage order of an unrestricted Policy at date
    t: probabilities multiply beliefs over all realised coordinates, the
    discount product runs over the first t-1 coordinates only.
    """
    T, N = config.T, config.n_types
    p = np.asarray(config.p)
    d = np.asarray(config.deltas)
    tables = []
    prob = p.copy()
    disc = np.ones(N)
    tables.append((prob.copy(), disc.copy()))
    for t in range(2, T + 1):
        # The last coordinate of the previous date's histories cycles
        # fastest, so its discount factor is a tile of the grid.
        last_delta = np.tile(d, len(disc) // N)
        if t <= T - 1:
            disc = np.repeat(disc * last_delta, N)
            prob = np.repeat(prob, N) * np.tile(p, len(prob))
            tables.append((prob.copy(), disc.copy()))
        else:
            tables.append((prob.copy(), (disc * last_delta).copy()))
    return tables


def solve_efficient_policy(config: ModelConfig) -> EfficientSolution:
    """First-best policy and multiplier over the unrestricted history tree."""
    config = validate(config)
    require_full_support_p(config)
    spec = config.utility
    I_T = config.income_npv()
    tables = _tree_tables(config)
    R_pow = [config.R ** (t - 1) for t in range(1, config.T + 1)]

    def budget(lam: float) -> float:
        total = 0.0
        for t, (prob, disc) in enumerate(tables, start=1):
            v = spec.rho(R_pow[t - 1] * disc / lam)
            total += float(np.dot(prob, spec.phi(v))) / R_pow[t - 1]
        return total

    lam_lo = 1.0 / spec.phi_prime(spec.u(I_T) + 1.0)
    lam_hi = lam_lo
    for _ in range(200):
        lam_hi *= 2.0
        if budget(lam_hi) < I_T:
            break
    else:
        raise SolverError("no upper bracket for the efficient multiplier")
    if budget(lam_lo) < I_T:
        raise SolverError("lower bracket already below income")
    lam = lam_hi
    for _ in range(BISECTION_MAX_ITER):
        lam = 0.5 * (lam_lo + lam_hi)
        resid = budget(lam) - I_T
        if abs(resid) <= BISECTION_REL_TOL * I_T:
            break
        if resid > 0:
            lam_lo = lam
        else:
            lam_hi = lam

    policy = Policy(config.T, config.n_types, None)
    for t, (prob, disc) in enumerate(tables, start=1):
        policy.values[t - 1][:] = spec.rho(R_pow[t - 1] * disc / lam)
    return EfficientSolution(
        policy=policy, lam=lam, budget_residual=budget(lam) - I_T)


def efficient_subtree(solution: EfficientSolution, config: ModelConfig,
                      delta1_index: int) -> Policy:
    """Restriction of the efficient policy to one initial type."""
    full = solution.policy
    sub = Policy(config.T, config.n_types, delta1_index)
    for t in range(1, config.T + 1):
        for hist in sub.node_histories(t):
            sub.set(t, hist, full.get(t, hist))
    return sub


# ---------------------------------------------------------------------------
# Three-period equilibrium via the binding-upward-IC reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedSolution:
    """Equilibrium of the three-period problem for one initial type.

    ``w`` and ``z`` are the date-2 and date-3 utilities per current type,
    ``U`` the date-2 continuation utilities w_n + delta_n z_n, ``U1`` the
    lowest type's value, ``Qbar`` the upper-tail agent-belief sums.  The
    binding upward constraints U_n = w_{n+1} + delta_n z_{n+1} hold by
    construction; their numerical residuals are recorded for audit.
    """

    delta1_index: int
    v1: float
    U1: float
    w: np.ndarray
    z: np.ndarray
    U: np.ndarray
    lam: float
    Qbar: np.ndarray
    separating: bool
    budget_residual: float
    binding_ic_residuals: np.ndarray

    def to_policy(self, config: ModelConfig) -> Policy:
        policy = Policy(3, config.n_types, self.delta1_index)
        root = (self.delta1_index,)
        policy.set(1, root, self.v1)
        for n in range(1, config.n_types + 1):
            policy.set(2, root + (n,), float(self.w[n - 1]))
            policy.set(3, root + (n,), float(self.z[n - 1]))
        return policy


def _reduced_value(config: ModelConfig, delta1_index: int, v1: float,
                   U1: float, z: np.ndarray) -> float:
    d = np.asarray(config.deltas)
    q = np.asarray(config.q)
    Qbar = q[::-1].cumsum()[::-1]
    rent = float(np.dot(Qbar[1:] * np.diff(d), z[1:]))
    return v1 + config.delta(delta1_index) * (U1 + rent)


def _w_from(config: ModelConfig, U1: float, z: np.ndarray) -> np.ndarray:
    d = np.asarray(config.deltas)
    steps = np.concatenate([[0.0], np.diff(d) * z[1:]])
    return U1 + np.cumsum(steps) - d * z


def _stationarity_residual(config: ModelConfig, delta1: float, lam: float,
                           U1: float, z: np.ndarray) -> np.ndarray:
    """Residuals of the reduced first-order system at fixed multiplier.

    Rows: the date-2 aggregate condition, the N-1 per-type conditions for
    the date-3 utilities of types above the bottom, and the undistorted
    bottom condition delta_1 R phi'(w_1) = phi'(z_1).
    """
    spec = config.utility
    d = np.asarray(config.deltas)
    p = np.asarray(config.p)
    q = np.asarray(config.q)
    R = config.R
    N = config.n_types
    w = _w_from(config, U1, z)
    pw = phi_prime_relaxed(spec, w)
    pz = phi_prime_relaxed(spec, z)
    Qbar = q[::-1].cumsum()[::-1]
    out = np.empty(N + 1)
    out[0] = delta1 - (lam / R) * float(np.dot(p, pw))
    for n in range(2, N + 1):
        i = n - 1
        tail = float(np.dot(p[i:], pw[i:]))
        out[n - 1] = ((d[i] - d[i - 1]) * (delta1 * Qbar[i] - (lam / R) * tail)
                      + (lam * p[i] * d[i] / R) * pw[i]
                      - (lam * p[i] / R ** 2) * pz[i])
    out[N] = d[0] * R * pw[0] - pz[0]
    return out


def _solve_inner_linear(config: ModelConfig, delta1: float, lam: float
                        ) -> tuple[float, np.ndarray]:
    """Direct solve of the stationarity system when phi' is linear (phi' =
    2v, the square-root family): N+1 linear equations in (U1, z)."""
    d = np.asarray(config.deltas)
    p = np.asarray(config.p)
    q = np.asarray(config.q)
    R = config.R
    N = config.n_types
    Qbar = q[::-1].cumsum()[::-1]

    # w = W_u * U1 + W_z @ z, all rows affine.
    W_u = np.ones(N)
    W_z = np.zeros((N, N))
    for n in range(1, N + 1):
        i = n - 1
        for j in range(1, i + 1):
            W_z[i, j] = d[j] - d[j - 1]
        W_z[i, i] -= d[i]

    A = np.zeros((N + 1, N + 1))  # unknowns: [U1, z_1..z_N]
    b = np.zeros(N + 1)
    # delta1 = (lam/R) sum p_n 2 w_n
    A[0, 0] = (2.0 * lam / R) * float(np.dot(p, W_u))
    A[0, 1:] = (2.0 * lam / R) * (p @ W_z)
    b[0] = delta1
    for n in range(2, N + 1):
        i = n - 1
        row = np.zeros(N + 1)
        dd = d[i] - d[i - 1]
        # -dd (lam/R) sum_{m>=n} p_m 2 w_m
        row[0] -= dd * (2.0 * lam / R) * float(np.sum(p[i:]))
        row[1:] -= dd * (2.0 * lam / R) * (p[i:] @ W_z[i:])
        # + (lam p_n d_n / R) 2 w_n
        row[0] += (2.0 * lam * p[i] * d[i] / R) * W_u[i]
        row[1:] += (2.0 * lam * p[i] * d[i] / R) * W_z[i]
        # - (lam p_n / R^2) 2 z_n
        row[1 + i] -= 2.0 * lam * p[i] / R ** 2
        A[n - 1] = row
        b[n - 1] = -dd * delta1 * Qbar[i]
    # delta_1 R 2 w_1 = 2 z_1
    A[N, 0] = d[0] * R * 2.0 * W_u[0]
    A[N, 1:] = d[0] * R * 2.0 * W_z[0]
    A[N, 1] -= 2.0
    b[N] = 0.0

    x = np.linalg.solve(A, b)
    return float(x[0]), x[1:]


def _solve_inner_newton(config: ModelConfig, delta1: float, lam: float,
                        x0: np.ndarray) -> tuple[float, np.ndarray]:
    """Damped Newton on the stationarity system for curved phi'."""
    N = config.n_types
    x = x0.copy()

    def F(x):
        return _stationarity_residual(config, delta1, lam, x[0], x[1:])

    fx = F(x)
    scale = max(1.0, float(np.max(np.abs(fx))))
    for _ in range(100):
        if np.max(np.abs(fx)) <= 1e-13 * scale:
            break
        J = np.empty((N + 1, N + 1))
        h = 1e-7
        for j in range(N + 1):
            step = h * max(1.0, abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += step
            xm[j] -= step
            J[:, j] = (F(xp) - F(xm)) / (2.0 * step)
        try:
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Jacobian in the inner solve: {exc}")
        norm0 = float(np.linalg.norm(fx))
        alpha = 1.0
        for _halving in range(30):
            trial = x + alpha * dx
            f_trial = F(trial)
            if float(np.linalg.norm(f_trial)) < norm0:
                x, fx = trial, f_trial
                break
            alpha *= 0.5
        else:
            raise SolverError(
                f"inner Newton stalled at residual {norm0:.3e}, "
                f"iterate {x.tolist()}")
    else:
        raise SolverError(
            f"inner Newton did not converge: residual "
            f"{float(np.max(np.abs(fx))):.3e}")
    return float(x[0]), x[1:]


def solve_equilibrium_t3(config: ModelConfig, delta1_index: int
                         ) -> ReducedSolution:
    """Equilibrium of the horizon-3 problem for one initial type.

    Inner stationarity solve at a fixed budget multiplier (direct linear
    solve for the square-root family, damped Newton otherwise, started
    from the efficient policy at the same multiplier), outer bisection on
    the multiplier against the firm-belief break-even residual.  Raises
    :class:`NonSeparatingError` when the candidate violates the
    monotonicity that validates the reduction.
    """
    config = validate(config)
    require_full_support_p(config)
    if config.T != 3:
        raise ValidationError([ValidationIssue(
            "T3_ONLY",
            f"the reduced equilibrium solver covers horizon 3, got "
            f"T={config.T}")])
    if not 1 <= delta1_index <= config.n_types:
        raise ValidationError([ValidationIssue(
            "DELTA1_INDEX",
            f"initial type index {delta1_index} outside 1..{config.n_types}")])
    spec = config.utility
    delta1 = config.delta(delta1_index)
    I3 = config.income_npv()
    R = config.R
    p = np.asarray(config.p)
    linear = spec.kind is not UtilityKind.LOG and spec.param == 0.5

    def efficient_start(lam: float) -> np.ndarray:
        w1 = spec.rho(R * delta1 / lam)
        z = spec.rho(R ** 2 * delta1 * np.asarray(config.deltas) / lam)
        return np.concatenate([[w1 + config.delta(1) * float(z[0])], z])

    last_x: np.ndarray | None = None

    def inner(lam: float) -> tuple[float, float, np.ndarray, np.ndarray]:
        nonlocal last_x
        v1 = spec.rho(1.0 / lam)
        if linear:
            U1, z = _solve_inner_linear(config, delta1, lam)
        else:
            x0 = last_x if last_x is not None else efficient_start(lam)
            try:
                U1, z = _solve_inner_newton(config, delta1, lam, x0)
            except SolverError:
                U1, z = _solve_inner_newton(config, delta1, lam,
                                            efficient_start(lam))
            last_x = np.concatenate([[U1], z])
        return v1, U1, z, _w_from(config, U1, z)

    def budget(lam: float) -> float:
        # The relaxed payment keeps the bisection well defined when the
        # candidate wanders below the floor; such candidates are rejected
        # after the solve.
        v1, _, z, w = inner(lam)
        return float(phi_relaxed(spec, v1)
                     + np.dot(p, phi_relaxed(spec, w)) / R
                     + np.dot(p, phi_relaxed(spec, z)) / R ** 2)

    lam_lo = 1.0 / spec.phi_prime(spec.u(I3) + 1.0)
    lam_hi = lam_lo
    for _ in range(200):
        lam_hi *= 2.0
        if budget(lam_hi) < I3:
            break
    else:
        raise SolverError("no upper bracket for the equilibrium multiplier")
    if budget(lam_lo) < I3:
        raise SolverError("lower bracket already below income")
    lam = lam_hi
    for _ in range(BISECTION_MAX_ITER):
        lam = 0.5 * (lam_lo + lam_hi)
        resid = budget(lam) - I3
        if abs(resid) <= BISECTION_REL_TOL * I3:
            break
        if resid > 0:
            lam_lo = lam
        else:
            lam_hi = lam

    v1, U1, z, w = inner(lam)
    d = np.asarray(config.deltas)
    q = np.asarray(config.q)
    U = w + d * z
    Qbar = q[::-1].cumsum()[::-1]
    binding = U[:-1] - (w[1:] + d[:-1] * z[1:])
    interior = (not spec.is_bounded_below) or bool(
        v1 > 0.0 and np.all(w > 0.0) and np.all(z > 0.0))
    separating = interior and bool(
        np.all(np.diff(w) < 0.0) and np.all(np.diff(z) > 0.0))
    solution = ReducedSolution(
        delta1_index=delta1_index, v1=float(v1), U1=float(U1),
        w=w, z=z, U=U, lam=float(lam), Qbar=Qbar, separating=separating,
        budget_residual=budget(lam) - I3,
        binding_ic_residuals=binding,
    )
    if not interior:
        raise NonSeparatingError(
            "relaxed-program candidate leaves the utility domain (some "
            "utility is at or below the floor); the separating reduction "
            "is invalid for this instance", solution)
    if not separating:
        raise NonSeparatingError(
            "reduced solution is not separating (w must fall and z must "
            "rise strictly in the type); the pooling case is out of scope",
            solution)
    return solution


def reduced_objective(solution: ReducedSolution, config: ModelConfig) -> float:
    """Date-1 expected payoff of the reduced solution under agent beliefs."""
    return _reduced_value(config, solution.delta1_index, solution.v1,
                          solution.U1, solution.z)


def information_rents(solution: ReducedSolution, config: ModelConfig
                      ) -> np.ndarray:
    """The rent terms delta_1 Qbar_n - (lam/R) sum_{m>=n} p_m phi'(w_m) for
    n >= 2; non-negative under agent optimism."""
    spec = config.utility
    p = np.asarray(config.p)
    pw = spec.phi_prime(solution.w)
    delta1 = config.delta(solution.delta1_index)
    out = []
    for n in range(2, config.n_types + 1):
        i = n - 1
        out.append(delta1 * solution.Qbar[i]
                   - (solution.lam / config.R) * float(np.dot(p[i:], pw[i:])))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuationCost:
    """Firm-belief expected NPV of payouts from a date-t report onward.

    ``date1_npv`` discounts every payout to date 1 (the common
    normalisation, constant across compared reports); ``date_t_npv``
    rescales by R**(t-1) to value the stream at the reporting date.  The
    two order reports identically.
    """

    t: int
    date1_npv: float
    date_t_npv: float


def continuation_cost(policy: Policy, config: ModelConfig,
                      history: tuple[int, ...], date_type_index: int
                      ) -> ContinuationCost:
    """Expected discounted cost of the consumption following a report.

    ``history`` is the pre-report history (delta_1, H_2^{t-1}) and
    ``date_type_index`` the report made at date t = len(history) + 1.
    """
    config = validate(config, allow_boundary_q=True)
    spec = config.utility
    full = history + (date_type_index,)
    t = len(full)
    if not 2 <= t <= config.T - 1:
        raise ValueError(
            f"reports happen at dates 2..{config.T - 1}, got date {t}")

    def rec(t: int, hist: tuple[int, ...]) -> float:
        cost = spec.phi(policy.get(t, hist)) / config.R ** (t - 1)
        if t == config.T:
            return cost
        if t == config.T - 1:
            return cost + spec.phi(policy.get(config.T, hist)) \
                / config.R ** (config.T - 1)
        return cost + sum(
            config.p[m - 1] * rec(t + 1, hist + (m,))
            for m in range(1, config.n_types + 1))

    npv1 = rec(t, full)
    return ContinuationCost(
        t=t, date1_npv=float(npv1),
        date_t_npv=float(npv1 * config.R ** (t - 1)))


@dataclass(frozen=True)
class BackloadingReport:
    """Per-type timing gaps g_n = phi'(z_n) - delta_n R phi'(w_n).

    g_1 vanishes (no distortion at the bottom); positive gaps above the
    bottom mean date-2/date-3 consumption is backloaded relative to the
    undistorted split at the same NPV.  ``top_gap`` isolates the highest
    type, whose gap shrinks as the grid refines.
    """

    gaps: np.ndarray
    top_gap: float


def check_backloading(solution: ReducedSolution, config: ModelConfig
                      ) -> BackloadingReport:
    if not solution.separating:
        raise NonSeparatingError(
            "backloading gaps are defined for separating solutions",
            solution)
    spec = config.utility
    d = np.asarray(config.deltas)
    gaps = spec.phi_prime(solution.z) - d * config.R * spec.phi_prime(solution.w)
    return BackloadingReport(gaps=gaps, top_gap=float(gaps[-1]))


@dataclass(frozen=True)
class EulerRow:
    t: int
    history: tuple[int, ...]
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def rel_residual(self) -> float:
        return abs(self.lhs - self.rhs) / max(1.0, abs(self.rhs))


@dataclass(frozen=True)
class EulerReport:
    """Residuals of the marginal-cost identities under constant shifts.

    Each row compares the firm-belief expected marginal cost of utility at
    adjacent dates: E_F[phi'(v_{t+1})] against R * E[delta] *
    E_F[phi'(v_t)], where the delta-expectation runs under agent beliefs
    for equilibrium policies and firm beliefs for efficient ones, and the
    date-1 row uses the realised initial discount factor.
    """

    kind: str
    rows: tuple[EulerRow, ...]

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r.residual) for r in self.rows)

    @property
    def max_rel_residual(self) -> float:
        return max(r.rel_residual for r in self.rows)


def check_inverse_euler(policy: Policy, config: ModelConfig, kind: str
                        ) -> EulerReport:
    """Identity residuals for an interior policy on the full tree.

    ``kind`` is ``"equilibrium"`` (delta-expectation under agent beliefs)
    or ``"efficient"`` (firm beliefs).  Root-pinned policies are checked
    on their subtree; unrestricted policies across every initial type.
    """
    config = validate(config, allow_boundary_q=True)
    if kind not in ("equilibrium", "efficient"):
        raise ValueError(f"kind must be equilibrium or efficient: {kind!r}")
    e_delta = config.q_bar() if kind == "equilibrium" else config.p_bar()
    spec = config.utility
    p = np.asarray(config.p)
    N = config.n_types
    roots = ([policy.root_index] if policy.root_index is not None
             else list(range(1, N + 1)))

    rows = []
    for r in roots:
        root = (r,)
        lhs = sum(p[n - 1] * spec.phi_prime(policy.get(2, root + (n,)))
                  for n in range(1, N + 1))
        rhs = config.R * config.delta(r) * spec.phi_prime(policy.get(1, root))
        rows.append(EulerRow(t=1, history=root, lhs=float(lhs), rhs=float(rhs)))
        for t in range(2, config.T):
            for hist in _prefixes(root, t - 2, N):
                if t + 1 == config.T:
                    lhs = sum(
                        p[n - 1] * spec.phi_prime(
                            policy.get(config.T, hist + (n,)))
                        for n in range(1, N + 1))
                else:
                    lhs = sum(
                        p[n - 1] * p[m - 1] * spec.phi_prime(
                            policy.get(t + 1, hist + (n, m)))
                        for n in range(1, N + 1) for m in range(1, N + 1))
                mean_t = sum(
                    p[n - 1] * spec.phi_prime(policy.get(t, hist + (n,)))
                    for n in range(1, N + 1))
                rows.append(EulerRow(
                    t=t, history=hist, lhs=float(lhs),
                    rhs=float(config.R * e_delta * mean_t)))
    return EulerReport(kind=kind, rows=tuple(rows))


def _prefixes(root: tuple[int, ...], extra: int, N: int
              ) -> list[tuple[int, ...]]:
    out = [root]
    for _ in range(extra):
        out = [h + (n,) for h in out for n in range(1, N + 1)]
    return out


@dataclass(frozen=True)
class LogGrowthRatios:
    """Firm-belief expected-consumption growth ratios per date transition."""

    equilibrium: tuple[float, ...]
    efficient: tuple[float, ...]


def log_growth_ratios(config: ModelConfig, delta1_index: int
                      ) -> LogGrowthRatios:
    """Expected-consumption growth of equilibrium vs efficient policies.

    Logarithmic utility only: there phi'(u(c)) = c, so the marginal-cost
    identities read directly as expected-consumption ratios.  The
    equilibrium side uses the horizon-3 reduced solve.
    """
    config = validate(config)
    if config.utility.kind is not UtilityKind.LOG:
        raise ValidationError([ValidationIssue(
            "LOG_ONLY", "growth ratios are defined for logarithmic utility")])
    spec = config.utility
    p = np.asarray(config.p)

    eq = solve_equilibrium_t3(config, delta1_index)
    eq_c = [float(spec.phi(eq.v1)),
            float(np.dot(p, spec.phi(eq.w))),
            float(np.dot(p, spec.phi(eq.z)))]

    eff = efficient_subtree(solve_efficient_policy(config), config,
                            delta1_index)
    eff_c = []
    for t in range(1, config.T + 1):
        values = np.array([eff.get(t, h) for h in eff.node_histories(t)])
        probs = np.array([
            float(np.prod([p[n - 1] for n in h[1:]]))
            for h in eff.node_histories(t)])
        eff_c.append(float(np.dot(probs, spec.phi(values))))

    eq_ratios = tuple(eq_c[t] / eq_c[t - 1] for t in range(1, 3))
    eff_ratios = tuple(eff_c[t] / eff_c[t - 1] for t in range(1, config.T))
    return LogGrowthRatios(equilibrium=eq_ratios, efficient=eff_ratios)
