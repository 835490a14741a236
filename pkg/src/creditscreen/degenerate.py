"""Solvers for the degenerate-impatience model: two discount factors with
firms certain that the impatient one always occurs (p_1 = 1), while the
agent assigns probability q_2 > 0 to the patient value.

Equilibrium reduces to maximising a geometric-weight objective over the
utilities along the all-impatient path, subject to the firm breaking even
on that path (the firm places probability one on it).  The maximiser has a
closed KKT form given the budget multiplier lambda:

    v_t = rho(weight_t * R**(t-1) / lambda)   (clipped at the floor)

with weights q_bar**(t-1) for t <= T-1 and q_bar**(T-2) * delta_1 at the
terminal date, where q_bar = q_1 delta_1 + q_2 delta_2 is the agent-belief
mean discount.  The budget NPV of that path is continuous and strictly
decreasing in lambda, so a bisection pins the multiplier.  Two reference
paths share the machinery: the efficient path (weights delta_1**(t-1),
the commonly-known-impatient benchmark) and the mean-discount benchmark
(weights q_bar**(t-1) at every date, including the last).

:func:`build_full_mechanism` completes the path into a full incentive-
compatible contract: the option taken after a patient report pays the
floor today and a constant utility thereafter, chosen so the impatient
type is exactly indifferent at every on-path node.

:func:`welfare_report` and :func:`sweep_horizon` compute the welfare and
backloading diagnostics: the mean-discount optimality gap, the efficiency
gap under the true discount factor, and the single crossing date at which
the equilibrium path overtakes the efficient one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import (
    ModelConfig,
    Policy,
    ValidationError,
    ValidationIssue,
    continuation_value,
    require_degenerate_impatience,
    validate,
)

__all__ = [
    "PathKind",
    "PathSolution",
    "WelfareReport",
    "SweepEntry",
    "SweepResult",
    "SolverError",
    "MechanismConstructionError",
    "solve_low_path",
    "build_full_mechanism",
    "welfare_report",
    "sweep_horizon",
]

BISECTION_MAX_ITER = 200
BISECTION_REL_TOL = 1e-12


class SolverError(RuntimeError):
    """Numerical failure inside a solver (bracket or convergence)."""


class MechanismConstructionError(RuntimeError):
    """The backward completion produced an infeasible off-path utility."""

    def __init__(self, date: int, value: float):
        self.date = date
        self.value = value
        super().__init__(
            f"off-path continuation utility at date {date} is infeasible: "
            f"{value!r}")


class PathKind(enum.Enum):
    EQUILIBRIUM = "equilibrium"
    EFFICIENT = "efficient"
    BENCHMARK = "benchmark"


@dataclass(frozen=True)
class PathSolution:
    """Utilities along the all-impatient path plus the budget multiplier.

    ``path[t-1]`` is v_t at the length-min(t, T-1) all-impatient history.
    ``corner`` flags dates where the floor bound binds (the multiplier on
    the non-negativity constraint is positive there).  The off-path date-t
    utilities of the full mechanism equal the floor at every date
    2..T-1; they are recorded for completeness.
    """

    kind: PathKind
    path: np.ndarray
    lam: float
    budget_residual: float
    corner: np.ndarray
    off_path_floor: float

    @property
    def T(self) -> int:
        return len(self.path)


def _path_weights(config: ModelConfig, kind: PathKind) -> np.ndarray:
    T = config.T
    t = np.arange(1, T + 1)
    if kind is PathKind.EFFICIENT:
        return config.delta(1) ** (t - 1)
    q_bar = config.q_bar()
    w = q_bar ** (t - 1.0)
    if kind is PathKind.EQUILIBRIUM:
        w[T - 1] = q_bar ** (T - 2) * config.delta(1)
    return w


def _path_for_lambda(config: ModelConfig, weights: np.ndarray, lam: float
                     ) -> tuple[np.ndarray, np.ndarray]:
    spec = config.utility
    T = config.T
    ratios = weights * config.R ** np.arange(T, dtype=float) / lam
    floor_cut = spec.phi_prime_at_floor if spec.is_bounded_below else -np.inf
    corner = ratios < floor_cut
    v = spec.rho(np.where(corner, max(floor_cut, 1.0), ratios))
    v = np.where(corner, spec.floor_utility if spec.is_bounded_below else v, v)
    return np.asarray(v, dtype=float), corner


def _budget_npv(config: ModelConfig, v: np.ndarray) -> float:
    disc = config.R ** -np.arange(config.T, dtype=float)
    return float(np.dot(config.utility.phi(v), disc))


def solve_low_path(config: ModelConfig, kind: PathKind) -> PathSolution:
    """Solve for the utilities along the all-impatient path.

    The budget NPV of the KKT path is strictly decreasing in lambda, so a
    sign-bracketing bisection on the break-even residual is globally
    convergent; the bracket failure branch is unreachable for validated
    configs but raises :class:`SolverError` with the attempted bracket.
    """
    config = validate(config, allow_boundary_q=True)
    require_degenerate_impatience(config)
    weights = _path_weights(config, kind)
    spec = config.utility
    I_T = config.income_npv()

    # At the optimum lambda = w_1 / phi'(v_1) and v_1 < u(I_T), so this
    # undershoots the root and the budget there exceeds I_T.
    lam_lo = weights[0] / spec.phi_prime(spec.u(I_T) + 1.0)
    lam_hi = lam_lo
    for _ in range(200):
        lam_hi *= 2.0
        v, _ = _path_for_lambda(config, weights, lam_hi)
        if _budget_npv(config, v) < I_T:
            break
    else:
        raise SolverError(
            f"no upper bisection bracket in ({lam_lo}, {lam_hi}) for {kind}")
    v_lo, _ = _path_for_lambda(config, weights, lam_lo)
    if _budget_npv(config, v_lo) < I_T:
        raise SolverError(
            f"lower bisection bracket {lam_lo} already below income for {kind}")

    lam = lam_hi
    for _ in range(BISECTION_MAX_ITER):
        lam = 0.5 * (lam_lo + lam_hi)
        v, _ = _path_for_lambda(config, weights, lam)
        resid = _budget_npv(config, v) - I_T
        if abs(resid) <= BISECTION_REL_TOL * I_T:
            break
        if resid > 0:
            lam_lo = lam
        else:
            lam_hi = lam

    v, corner = _path_for_lambda(config, weights, lam)
    return PathSolution(
        kind=kind,
        path=v,
        lam=lam,
        budget_residual=_budget_npv(config, v) - I_T,
        corner=corner,
        off_path_floor=spec.floor_utility,
    )


# ---------------------------------------------------------------------------
# Full mechanism
# ---------------------------------------------------------------------------

def build_full_mechanism(config: ModelConfig, eq_path: PathSolution) -> Policy:
    """Complete the equilibrium path into a full incentive-compatible policy.

    On the restricted tree (first report pinned to the impatient type):
    the all-impatient path carries the solved values; a patient report at
    date t in 2..T-1 pays the floor utility at t and a constant utility
    thereafter, chosen backwards so that the impatient type's incentive
    constraint holds with equality at every on-path node.  The patient
    type's constraint is then automatically slack or tight, which the
    caller can confirm via the oracle deviation check.
    """
    config = validate(config, allow_boundary_q=True)
    require_degenerate_impatience(config)
    if eq_path.kind is not PathKind.EQUILIBRIUM:
        raise ValueError("full mechanism is defined for the equilibrium path")
    T = config.T
    if eq_path.T != T:
        raise ValueError(f"path has length {eq_path.T}, config has T={T}")
    floor = config.utility.floor_utility
    q_bar = config.q_bar()
    d1 = config.delta(1)
    v = eq_path.path

    policy = Policy(T=T, n_types=2, root_index=1)
    low = (1,)
    for t in range(1, T + 1):
        hist = low * min(t, T - 1)
        policy.set(t, hist, float(v[t - 1]))

    # Backwards: vbar_t solves  v_t + d1 * C(L^t) = floor + d1 * g * vbar_t,
    # where g = sum_{j=0..T-t-1} q_bar**j values the constant continuation.
    vbars: dict[int, float] = {}
    cont_low = float(v[T - 1])  # C(L^{T-1}) = v_T
    for t in range(T - 1, 1, -1):
        g = float(sum(q_bar ** j for j in range(T - t)))
        vbar = (float(v[t - 1]) + d1 * cont_low - floor) / (d1 * g)
        if config.utility.is_bounded_below and vbar < floor - 1e-12:
            raise MechanismConstructionError(t, vbar)
        vbars[t] = vbar
        # One step back along the low path:
        #   C(L^{t-1}) = q1 (v_t + d1 C(L^t)) + q2 (floor + d2 g vbar_t)
        cont_low = (
            config.q[0] * (float(v[t - 1]) + d1 * cont_low)
            + config.q[1] * (floor + config.delta(2) * g * vbar)
        )

    # Fill every node that has left the low path: floor at the departure
    # date, the departure's constant afterwards.
    for t in range(2, T + 1):
        for hist in policy.node_histories(t):
            dep = _first_departure(hist)
            if dep is None:
                continue
            if t == dep:
                policy.set(t, hist, floor)
            else:
                policy.set(t, hist, vbars[dep])
    return policy


def _first_departure(hist: tuple[int, ...]) -> int | None:
    """Date of the first patient report in a restricted-tree history."""
    for pos, n in enumerate(hist):
        if n != 1:
            return pos + 1
    return None


def mechanism_ic_residuals(policy: Policy, config: ModelConfig
                           ) -> list[dict[str, float]]:
    """Residuals of both date-t incentive constraints at every on-path node.

    ``low`` is truthful-minus-deviation for the impatient type (zero by
    construction), ``high`` the same for the patient type (must be >= 0).
    """
    out = []
    low = (1,)
    for t in range(2, config.T):
        stay = low * t
        leave = low * (t - 1) + (2,)
        value_stay = policy.get(t, stay)
        value_leave = policy.get(t, leave)
        cont_stay = continuation_value(policy, config, stay)
        cont_leave = continuation_value(policy, config, leave)
        out.append({
            "t": t,
            "low": (value_stay + config.delta(1) * cont_stay)
                   - (value_leave + config.delta(1) * cont_leave),
            "high": (value_leave + config.delta(2) * cont_leave)
                    - (value_stay + config.delta(2) * cont_stay),
        })
    return out


def path_objective(config: ModelConfig, path: np.ndarray) -> float:
    """Equilibrium-weight value of a low-path utility sequence."""
    w = _path_weights(config, PathKind.EQUILIBRIUM)
    return float(np.dot(w, path))


# ---------------------------------------------------------------------------
# Welfare diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WelfareReport:
    """Welfare scalars and the backloading crossing date.

    W_A / W_E value the mean-discount benchmark problem at its own optimum
    and at the equilibrium path; V_B / V_E value the true-discount problem
    at the efficient and equilibrium paths.  ``t_star`` is the date at
    which the equilibrium path overtakes the efficient one (strictly below
    before, strictly above after); ``crossing_monotone`` is False when the
    solved paths violate that single-crossing shape, with the first
    offending date recorded.
    """

    W_A: float
    W_E: float
    V_B: float
    V_E: float
    t_star: int | None
    crossing_monotone: bool
    violation_date: int | None
    equilibrium: PathSolution
    efficient: PathSolution
    benchmark: PathSolution


def _crossing_index(v_eq: np.ndarray, v_eff: np.ndarray, tol: float = 1e-11
                    ) -> tuple[int | None, bool, int | None]:
    """Single-crossing date of the equilibrium over the efficient path.

    Returns (t_star, monotone, violation_date).  The valid shape is
    strictly-below up to the crossing and strictly-above after it, with at
    most one touching date in between; anything else flags the first
    offending date.  Identical paths (the shared-beliefs boundary) report
    no crossing but count as monotone.
    """
    d = np.asarray(v_eq, dtype=float) - np.asarray(v_eff, dtype=float)
    T = len(d)
    if np.all(np.abs(d) <= tol):
        return None, True, None
    signs = np.where(d > tol, 1, np.where(d < -tol, -1, 0))
    pos = np.nonzero(signs > 0)[0]
    if len(pos) == 0:
        return None, False, 1
    first_pos = int(pos[0])
    if first_pos == 0:
        return None, False, 1
    bad_after = np.nonzero(signs[first_pos:] <= 0)[0]
    if len(bad_after):
        return first_pos + 1, False, int(bad_after[0]) + first_pos + 1
    zeros_before = np.nonzero(signs[:first_pos] == 0)[0]
    if len(zeros_before) == 0:
        t_star = first_pos + 1
    elif len(zeros_before) == 1 and int(zeros_before[0]) == first_pos - 1:
        t_star = first_pos
    else:
        return first_pos + 1, False, int(zeros_before[0]) + 1
    if t_star == T:
        # Overtaking only at the terminal date: the crossing index T-1
        # satisfies the strict ordering on both sides.
        t_star = T - 1
    return t_star, True, None


def welfare_report(config: ModelConfig) -> WelfareReport:
    config = validate(config, allow_boundary_q=True)
    require_degenerate_impatience(config)
    eq = solve_low_path(config, PathKind.EQUILIBRIUM)
    eff = solve_low_path(config, PathKind.EFFICIENT)
    bench = solve_low_path(config, PathKind.BENCHMARK)

    w_bench = _path_weights(config, PathKind.BENCHMARK)
    w_eff = _path_weights(config, PathKind.EFFICIENT)
    W_A = float(np.dot(w_bench, bench.path))
    W_E = float(np.dot(w_bench, eq.path))
    V_B = float(np.dot(w_eff, eff.path))
    V_E = float(np.dot(w_eff, eq.path))

    t_star, monotone, violation = _crossing_index(eq.path, eff.path)
    return WelfareReport(
        W_A=W_A, W_E=W_E, V_B=V_B, V_E=V_E,
        t_star=t_star, crossing_monotone=monotone, violation_date=violation,
        equilibrium=eq, efficient=eff, benchmark=bench,
    )


@dataclass(frozen=True)
class SweepEntry:
    T: int
    W_A: float
    W_E: float
    V_B: float
    V_E: float
    t_star: int | None

    @property
    def benchmark_gap(self) -> float:
        return self.W_A - self.W_E

    @property
    def efficiency_gap(self) -> float:
        return self.V_B - self.V_E


@dataclass(frozen=True)
class SweepResult:
    entries: tuple[SweepEntry, ...]
    side_condition_checked: bool
    side_condition_holds: bool | None
    warnings: tuple[str, ...]

    @property
    def benchmark_gaps(self) -> np.ndarray:
        return np.array([e.benchmark_gap for e in self.entries])

    @property
    def efficiency_gaps(self) -> np.ndarray:
        return np.array([e.efficiency_gap for e in self.entries])


def sweep_horizon(config: ModelConfig, t_values: list[int]) -> SweepResult:
    """Welfare gaps across horizons for a per-period-income template.

    Checks and reports the persistent-inefficiency side condition
    q_bar * R * phi'(u(I_inf)) > phi'_+(0) (with I_inf = w R / (R - 1)
    when R > 1; not checkable at R = 1).  A failure only attaches a
    warning, the sweep still runs.
    """
    from .model import Income, IncomeKind

    config = validate(config, allow_boundary_q=True)
    require_degenerate_impatience(config)
    if config.income.kind is not IncomeKind.PER_PERIOD:
        raise ValidationError([ValidationIssue(
            "SWEEP_INCOME", "horizon sweep requires per-period income")])

    warnings = []
    if config.delta(1) * config.R > 1.0:
        warnings.append(
            f"delta1 * R = {config.delta(1) * config.R:.6g} > 1: the "
            "efficient path is not weakly decreasing, trend results may "
            "not apply")

    spec = config.utility
    if config.R > 1.0:
        I_inf = config.income.value * config.R / (config.R - 1.0)
        lhs = config.q_bar() * config.R * spec.phi_prime(spec.u(I_inf))
        floor_cut = (spec.phi_prime_at_floor if spec.is_bounded_below else 0.0)
        side_checked = True
        side_holds = bool(lhs > floor_cut)
        if not side_holds:
            warnings.append(
                f"persistent-gap side condition fails: {lhs:.6g} <= "
                f"{floor_cut:.6g}")
    else:
        side_checked = False
        side_holds = None
        warnings.append(
            "R = 1: side condition not checkable (infinite income limit)")

    entries = []
    for T in t_values:
        report = welfare_report(
            ModelConfig(T=T, deltas=config.deltas, p=config.p, q=config.q,
                        R=config.R, income=config.income,
                        utility=config.utility))
        entries.append(SweepEntry(
            T=T, W_A=report.W_A, W_E=report.W_E, V_B=report.V_B,
            V_E=report.V_E, t_star=report.t_star))
    return SweepResult(
        entries=tuple(entries),
        side_condition_checked=side_checked,
        side_condition_holds=side_holds,
        warnings=tuple(warnings),
    )
